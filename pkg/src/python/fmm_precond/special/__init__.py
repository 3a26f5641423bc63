from fmm_precond.special.functions import bessel_j, bessel_y, hankel1
from fmm_precond.special.kernels import (Kernel, KernelType, greens, greens_normal_derivative,
                                         singular_diagonal_2d)

__all__ = ['bessel_j', 'bessel_y', 'hankel1', 'Kernel', 'KernelType', 'greens',
           'greens_normal_derivative', 'singular_diagonal_2d']
