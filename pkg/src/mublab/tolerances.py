"""Central numerical tolerances.

Every module pulls its tolerances from here so that the acceptance suite
has a single point of tuning.  Values are absolute unless noted.
"""

# state vectors / unitaries
NORM_ATOL = 1e-12          # | ||psi|| - 1 |
UNITARY_ATOL = 1e-10       # entrywise |M^dag M - I|
PROB_SUM_ATOL = 1e-10      # | sum(p) - 1 |
PROB_CLAMP = -1e-12        # most negative probability tolerated before clamping to 0
PHASE_INVARIANCE_ATOL = 1e-14

# entropy evaluation
ENTROPY_ZERO_CUTOFF = 1e-15   # probabilities below this contribute exactly 0

# catalog construction
MUB_ATOL = 1e-10           # mutual-unbiasedness deviation for a valid set
CATALOG_ATOL = 1e-12       # transcribed matrices must be this tight
RELATION_ATOL = 1e-12      # generating relations, columnwise

# symmetry verification
IDENTITY_ATOL = 1e-10      # Fourier-conjugation identity residual
CLASS_MATCH_ATOL = 1e-9    # probability-vector matching in automorphism checks
TABLE_RELATION_ATOL = 1e-2  # state-to-state matching limited by 2-decimal rounding

# certified bounds
ENTROPY_CLASS_ATOL = 1e-3  # assignment of a certified minimum to a class bound
VARIANCE_CLASS_ATOL = 1e-2
PAIR_BOUND_SLACK = 1e-6    # certified pair minima may undershoot log2(d) by this
MC_BOUND_SLACK = 1e-9      # Monte-Carlo samples may undershoot an exact bound by this
S2_MC_BOUND_SLACK = 1e-3   # the numeric class bound is only known to 5 decimals
TABLE_STATE_SLACK = 2e-2   # entropy excess allowed for 2-decimal rounded states

# detector models
POVM_COMPLETENESS_ATOL = 1e-8
POVM_EIGENVALUE_ATOL = -1e-10   # smallest admissible POVM-element eigenvalue
HERMITICITY_ATOL = 1e-10
