from .errors import SolverError
from .feasible import FeasibleSet
from .problems import Problem, SmoothFunction
from .registry import get_problem, list_problems
from .schemas import ArpccConfig, ArpgcConfig, Certificate, EvalCounters, SubsolverControls, TraceRecord
from .tensors import SymTensor, TaylorData
