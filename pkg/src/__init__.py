from vehicle import __all__ as vehicle_all
from geodesy import __all__ as geodesy_all
from sensors import __all__ as sensors_all
from estimator import __all__ as estimator_all
from controller import __all__ as controller_all
from harness import __all__ as harness_all
from navsim import __all__ as navsim_all
from utils import __all__ as utils_all

__all__ = (
    vehicle_all + geodesy_all + sensors_all + estimator_all + controller_all + harness_all + navsim_all + utils_all
)
