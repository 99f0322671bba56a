from .models import GeodeticCoord, LtpFrame
from .ltp import EARTH_RADIUS_M, VALIDITY_RADIUS_M, from_ltp, make_ltp, to_ltp
from .magnetometer import field_from_heading, heading_from_magnetometer

__all__ = [
    "EARTH_RADIUS_M",
    "VALIDITY_RADIUS_M",
    "GeodeticCoord",
    "LtpFrame",
    "field_from_heading",
    "from_ltp",
    "heading_from_magnetometer",
    "make_ltp",
    "to_ltp",
]
