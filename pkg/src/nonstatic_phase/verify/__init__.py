"""
Independent numerical checks of the closed-form phases and wave functions.
"""
from .audit import CHECKS, CheckRecord, constancy_audit, random_inputs, run_suite
from .gauge import gauge_invariance_check, overlap_boundary_phase
from .oracles import quad_gamma_d, quad_gamma_g, quad_T
from .residuals import ResidualReport, schrodinger_residual
