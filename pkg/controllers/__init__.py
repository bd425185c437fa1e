from .arpcc import arpcc_minimize, kappa_s, kappa_u, sigma_update
from .arpgc import initial_target, phase_one, phase_two, recover_multipliers, solve_general, verify_certificate
from .criticality import chi, kappa_n, pi
from .runs import arpcc_config, arpgc_config, persist_trace, run_convex, run_general
from .sweeps import fit_slope, sweep
from .traces import TraceSink, parse_records, read_trace, replay_check, write_trace
