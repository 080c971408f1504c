"""2D generalized MHD in vorticity-current form with nonlocal dissipation."""

from .kernel import (DissipationSymbol, KernelProfile, LogWeak, PowerLaw,
                     Tabulated, ValidationReport, Verdict,
                     closed_form_fractional_symbol, compute_symbol, evaluate_m,
                     validate_profile)
from .spectral import (ScalarField, SpectralGrid, VectorField, apply_symbol,
                       biot_savart, curl_2d, dealias, divergence, gradient,
                       laplacian, pointwise_product, symbol_for_grid)
from .dynamics import (BudgetAccumulators, CflViolation, SimState,
                       StepperConfig, reconstruct, rhs, run, step, t_term)
from .diagnostics import (Collector, DiagnosticsRecord, bkm_monitor,
                          energy_budget, enstrophy_budget, forcing_f,
                          pointwise_d, positivity_check, structural_g)
from .presets import orszag_tang, random_band, single_mode

__version__ = "0.1.0"
