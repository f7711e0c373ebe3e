"""API blueprints package."""
from kernelkit.api.health import health_bp
from kernelkit.api.toolkit import toolkit_bp

__all__ = [
    "health_bp",
    "toolkit_bp",
]
