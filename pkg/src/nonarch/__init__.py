"""Measures, characters and pseudo-differential operators on Q_p and F_p((t))."""
from .errors import (BoundaryError, CoverageError, DivergenceError, DomainError,
                     NoLimitError)
from .field import (Ball, FieldDescriptor, PAdic, Fpt, Qp, format_padic, parse_padic)
from .fourier import LocallyConstantFn, character_value, fourier_lc, integrate_lc, point
from .functionals import charfun, positive_definite_probe, smoothing_mass
from .linops import MatrixK, scde_decompose
from .measures import (ProductMeasure, ShellMeasure1D, custom_measure, exp_measure,
                       geometric_product, geometric_shell_measure)
from .pseudodiff import measure_pd, pd, vladimirov
from .suites import SUITES, run_suite

__version__ = "0.1.0"
