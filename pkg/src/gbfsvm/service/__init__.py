"""HTTP service wrapping the package: ball covers, training, benchmarks."""

from .app import create_app  # noqa: F401
