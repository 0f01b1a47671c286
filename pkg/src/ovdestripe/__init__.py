"""Oblique stripe removal: orientation estimation, oriented-variation
destriping, a ground-truthed simulator and quality indices."""
from .guided_filter import GuidedFilterParams, background_eliminate, guided_self_filter
from .image import (
    D_H, D_V, InvalidImageError, OffsetOperator, apply_offset_diff, apply_offset_diff_adjoint,
    center_crop, normalize, operator_spectrum, rotate,
)
from .imageio import ImageFormatError, read_image, write_image
from .metrics import SampleWindows, Window, icv, mae, mrd, psnr, ssim
from .orientation import (
    CandidateDirection, OrientationResult, OrientationUndeterminable, enumerate_candidates,
    estimate_orientation, select_candidate,
)
from .simulator import StripeSpec, add_gaussian_noise, add_stripes, make_oblique, simulate_group
from .solver import (
    DestripeResult, SolverDiagnosticError, SolverParams, destripe, remove_stripes,
)

__version__ = "0.1.0"
