from torus import SpectralField, field_power, laplacian_apply


def residual(field: SpectralField, c: float, p: int) -> SpectralField:
    """Galerkin projection of -Delta phi + c phi - phi^(p+1)."""
    return -laplacian_apply(field) + c * field - field_power(field, p + 1)


__all__ = [
    "residual",
]
