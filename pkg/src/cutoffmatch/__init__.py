"""Two-sided matching with supervisor budget constraints.

Applicants are matched to projects; projects are funded by supervisors whose
divisible budgets may be pooled across the projects they supervise.  The
package provides feasibility checking via exact max-flow, stability
verification (weak / cutoff / strong), a cutoff-decreasing matching
algorithm, an exact MILP for maximum-size cutoff stable matchings, and
leximin-egalitarian funding allocation.
"""

from cutoffmatch.model import Instance, ValidationError, gadget, validate_instance
from cutoffmatch.stability import Matching, check_stability

__all__ = [
    "Instance",
    "Matching",
    "ValidationError",
    "check_stability",
    "gadget",
    "validate_instance",
]
