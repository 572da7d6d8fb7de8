"""Interior and exterior conformal moduli of quadrilaterals."""
