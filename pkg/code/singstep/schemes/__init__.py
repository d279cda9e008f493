from .ode_steppers import (
    SolutionTrace,
    step_ie,
    step_cn,
    step_bdf2,
    solve_ode
)

from .pde_solver import (
    SpaceGrid,
    FieldTrace,
    assemble_operator,
    solve_pde,
    discrete_l2_error
)

from .l1_subdiffusion import (
    L1Weights,
    MittagLefflerEval,
    l1_weights,
    l1_caputo_apply,
    solve_l1,
    mittag_leffler
)

from .doc_kernels import (
    DocKernelSet,
    DocBoundReport,
    bdf2_kernel,
    doc_closed_form,
    doc_recursive_oracle,
    doc_bound_check
)
