from fastapi import APIRouter, HTTPException
from starlette import status

from models import list_problems
from models.errors import UnknownProblemError
from models.registry import get_problem
from models.schemas import ProblemSummary

router = APIRouter()


def _summary(problem) -> ProblemSummary:
    return ProblemSummary(
        name=problem.name,
        dim=problem.dim,
        constraints=problem.m,
        feasible_set=problem.feasible.variant.value,
        f_low=problem.f_low,
        f_up=problem.f_up,
        lipschitz=problem.lipschitz,
        description=problem.description,
    )


@router.get('/', response_model=list[ProblemSummary])
async def get_problems():
    return [_summary(problem) for problem in list_problems()]


@router.get('/{name}', response_model=ProblemSummary)
async def get_problem_summary(name: str):
    try:
        return _summary(get_problem(name))
    except UnknownProblemError as e:
        raise HTTPException(status_code=status.HTTP_404_NOT_FOUND, detail=str(e))
