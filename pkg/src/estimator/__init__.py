from .models import EkfConfig, EstimatorState
from .ekf import predict, update_gps, update_heading

__all__ = ["EkfConfig", "EstimatorState", "predict", "update_gps", "update_heading"]
