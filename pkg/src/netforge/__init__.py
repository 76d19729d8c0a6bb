"""Construction, verification and discrepancy of (0,m,2)-nets in base b."""

from .badic import (
    ElementaryInterval,
    GridBox,
    containing_interval,
    count_intervals,
    cover_set,
    shapes_of_weight,
)
from .discrepancy import (
    bound_0m2,
    extreme_discrepancy,
    local_discrepancy,
    star_discrepancy,
)
from .errors import BudgetExceeded, InvalidChoice, MalformedInput, NetforgeError, WidthOverflowError
from .greedy import (
    AvailabilityState,
    Lexicographic,
    RunOutcome,
    Scripted,
    SeededUniform,
    greedy_run,
    stall_search,
)
from .points import NetPoints, place
from .recursive import PermutationFamily, hammersley, psi_apply, recursive_run, scale_stack, stack_nets
from .verify import NetReport, exhaustive_search, is_net, strength

__version__ = "0.1.0"
