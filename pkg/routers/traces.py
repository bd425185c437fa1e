from fastapi import APIRouter, HTTPException, Request
from starlette import status

from controllers import parse_records, replay_check
from models.errors import TraceFormatError
from models.schemas import ReplayReport

router = APIRouter()


@router.post('/check', response_model=ReplayReport)
async def check_trace(request: Request):
    body = await request.body()
    try:
        records = parse_records(body)
    except TraceFormatError as e:
        raise HTTPException(status_code=status.HTTP_400_BAD_REQUEST, detail=str(e))
    return replay_check(records)
