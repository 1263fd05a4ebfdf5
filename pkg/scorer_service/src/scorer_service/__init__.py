"""Reference external scorer/refiner for the scorer wire protocol."""

from .backend import NgramBackend, load_backend
from .service import ScorerService
from .wire import WireRequest, WireResponse, parse_request, serialize_request, serialize_response

__version__ = "0.1.0"
