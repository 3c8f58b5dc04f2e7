"""Reference fixture generator; see generate.py and validate.py."""

from .curves import REGISTRY, OracleCurve, OracleError, resolve_curve
from .generate import OracleRequest, generate_fixtures
from .validate import cross_validate
