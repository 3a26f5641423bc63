from fmm_precond.fmm.config import Backend, FmmConfig, accuracy_to_order
from fmm_precond.fmm.direct import direct_sum, kernel_block, p2p
from fmm_precond.fmm.evaluate import FmmPlan, evaluate
from fmm_precond.fmm.expansions import (Expansion, ExpansionKind, evaluate_multipole, l2l, l2p, m2l, m2m,
                                        p2m)

__all__ = ['Backend', 'FmmConfig', 'accuracy_to_order', 'direct_sum', 'kernel_block', 'p2p', 'FmmPlan',
           'evaluate', 'Expansion', 'ExpansionKind', 'evaluate_multipole', 'l2l', 'l2p', 'm2l', 'm2m', 'p2m']
