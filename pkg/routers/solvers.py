from fastapi import APIRouter, HTTPException
from pydantic import ValidationError
from starlette import status
from starlette.concurrency import run_in_threadpool

from controllers import arpcc_config, arpgc_config, persist_trace, run_convex, run_general
from models import settings
from models.errors import SolverError, UnknownProblemError
from models.schemas import ConvexSolveRequest, ConvexSolveResponse, GeneralSolveRequest, GeneralSolveResponse

router = APIRouter()


def _solve_convex(request: ConvexSolveRequest) -> ConvexSolveResponse:
    cfg = arpcc_config(p=request.p, eps=request.eps, sigma0=request.sigma0, theta=request.theta,
                       max_iters=request.max_iters)
    run = run_convex(request.problem, cfg, seed=request.seed)
    persist_trace(run.sink, settings.TRACE_DIR)
    result = run.result
    return ConvexSolveResponse(
        run_id=run.sink.run_id,
        problem=request.problem,
        status=result.status,
        x=result.x_eps.tolist(),
        f=result.f_eps,
        chi=result.chi_eps,
        iterations=result.iterations,
        successful=result.successful,
        counters=result.counters,
        replay_passed=run.replay.passed,
    )


def _solve_general(request: GeneralSolveRequest) -> GeneralSolveResponse:
    inner = arpcc_config(p=request.p, sigma0=request.sigma0, theta=request.theta, max_iters=request.max_iters)
    cfg = arpgc_config(inner, eps_p=request.eps_p, eps_d=request.eps_d, delta=request.delta, beta=request.beta)
    run = run_general(request.problem, cfg, seed=request.seed)
    persist_trace(run.sink, settings.TRACE_DIR)
    return GeneralSolveResponse(
        run_id=run.sink.run_id,
        problem=request.problem,
        certificate=run.certificate,
        verified=run.verified,
        counters=run.counters,
        replay_passed=run.replay.passed,
    )


async def _dispatch(handler, request):
    try:
        return await run_in_threadpool(handler, request)
    except UnknownProblemError as e:
        raise HTTPException(status_code=status.HTTP_404_NOT_FOUND, detail=str(e))
    except ValidationError as e:
        raise HTTPException(status_code=status.HTTP_422_UNPROCESSABLE_ENTITY, detail=[{'loc': list(err['loc']), 'msg': err['msg']} for err in e.errors()])
    except SolverError as e:
        raise HTTPException(status_code=status.HTTP_400_BAD_REQUEST, detail=str(e))


@router.post('/convex', response_model=ConvexSolveResponse)
async def solve_convex(request: ConvexSolveRequest):
    return await _dispatch(_solve_convex, request)


@router.post('/general', response_model=GeneralSolveResponse)
async def solve_general(request: GeneralSolveRequest):
    return await _dispatch(_solve_general, request)
