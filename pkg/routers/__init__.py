from .problems import router as problem_router
from .solvers import router as solver_router
from .sweeps import router as sweep_router
from .traces import router as trace_router
