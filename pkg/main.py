import logging

from fastapi import FastAPI

from models import settings
from routers import problem_router, solver_router, sweep_router, trace_router

logging.basicConfig(level=settings.LOG_LEVEL)

app = FastAPI(title='Adaptive regularization solvers')


app.include_router(
    router=problem_router,
    prefix='/api/v1/problems'
)

app.include_router(
    router=solver_router,
    prefix='/api/v1/solve'
)

app.include_router(
    router=trace_router,
    prefix='/api/v1/traces'
)

app.include_router(
    router=sweep_router,
    prefix='/api/v1/sweeps'
)
