"""
Centralized constants for symdyn.

Search bounds, caps and report vocabulary used across the services and the
command line. Anything a user can tune also appears in config.json.
"""

# =============================================================================
# Search bounds (command-line flags)
# =============================================================================

DEFAULT_RADIUS = 3
DEFAULT_WINDOW = 4
DEFAULT_LENGTH = 8
DEFAULT_DEPTH = 4
DEFAULT_CAP = 6

# Extra shells a pattern must extend through before it counts as admissible
DEFAULT_MARGIN = 2

# Sampling radius for the tracked SFT of a coloring automaton
DEFAULT_SAMPLE_RADIUS = 4

# =============================================================================
# Safety caps for exhaustive searches
# =============================================================================

# Coset colorings cost |V|^|G_j|, so finite factors are bounded
DEFAULT_FACTOR_ORDER_CAP = 6

# Simple-cycle enumeration is exponential in the vertex count
DEFAULT_CYCLE_VERTEX_CAP = 12

# Products of window differences tried when deciding <F> = G
DEFAULT_SUBGROUP_SEARCH_DEPTH = 4

DEFAULT_PSEUDO_ORBIT_BUDGET = 200_000

# Patterns enumerated by a single extension query before giving up
DEFAULT_PATTERN_BUDGET = 500_000

DEFAULT_SEED = 0

# =============================================================================
# Exit codes
# =============================================================================

EXIT_POSITIVE = 0
EXIT_NEGATIVE = 1
EXIT_UNKNOWN = 2
EXIT_INPUT_ERROR = 3

# =============================================================================
# Spec file vocabulary
# =============================================================================

SECTION_KINDS = frozenset(
    ["group", "sft", "automaton", "map", "presentation", "system", "pseudo-orbit"]
)

IDENTITY_TOKEN = "e"

# Tracking arrows in the tracked alphabet B = A x {<, >, -}^S
ARROW_BACK = "<"
ARROW_FORWARD = ">"
ARROW_NONE = "-"

# Separator between a color and its arrow word in tracked letter names
TRACK_SEPARATOR = "|"

# Separator between the two coordinates of a restricted-product letter
PAIR_SEPARATOR = "/"

# =============================================================================
# Toeplitz coding
# =============================================================================

TOEPLITZ_SYMBOLS = (1, 2)
TOEPLITZ_FILLER = 3
