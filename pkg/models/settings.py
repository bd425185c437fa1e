from os import environ

from dotenv import load_dotenv

load_dotenv()

TRACE_DIR = environ.get('ARP_TRACE_DIR')

LOG_LEVEL = environ.get('ARP_LOG_LEVEL', 'WARNING')
