from laplaceforge.commands import (
    exp_isotropy,
    exp_partition,
    exp_singvals,
    ilt_analytic,
    ilt_discrete,
    lt,
    sample_surface,
    validate,
)

# registration order is the order shown by --help
COMMANDS = [lt, ilt_analytic, ilt_discrete, sample_surface, exp_singvals, exp_partition, exp_isotropy, validate]
