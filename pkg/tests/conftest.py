import numpy as np
import pytest
import pytest_asyncio
from httpx import AsyncClient

from main import app


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


@pytest_asyncio.fixture(scope="function")
async def client():
    async with AsyncClient(app=app, base_url="http://testserver") as test_client:
        yield test_client
