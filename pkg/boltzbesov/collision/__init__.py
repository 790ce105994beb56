"""Non-cutoff collision kernel, operators Q, Gamma, L and the triple norm by explicit quadrature."""
