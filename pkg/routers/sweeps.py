from fastapi import APIRouter, HTTPException
from starlette import status
from starlette.concurrency import run_in_threadpool

from controllers import sweep
from models.errors import SolverError, UnknownProblemError
from models.schemas import SweepRequest, SweepResult

router = APIRouter()


@router.post('/', response_model=SweepResult)
async def run_sweep(request: SweepRequest):
    try:
        return await run_in_threadpool(sweep, request.problem, request.p, request.eps_grid)
    except UnknownProblemError as e:
        raise HTTPException(status_code=status.HTTP_404_NOT_FOUND, detail=str(e))
    except SolverError as e:
        raise HTTPException(status_code=status.HTTP_400_BAD_REQUEST, detail=str(e))
