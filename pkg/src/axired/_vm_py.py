"""Pure-numpy evaluator for compiled expression programs.

Vectorized over points: one numpy operation per instruction.  Mirrors the
status codes of the compiled kernel in ``_vm.pyx``.
"""
import numpy as np

(OP_CONST, OP_VAR, OP_ADD, OP_MUL, OP_POWI, OP_POWR, OP_SQRT, OP_RSQRT,
 OP_SIN, OP_COS, OP_TAN, OP_EXP, OP_LOG, OP_SINH, OP_COSH) = range(15)

OK, ERR_DOMAIN, ERR_NONFINITE = 0, 1, 2

_UNARY = {
    OP_SIN: np.sin, OP_COS: np.cos, OP_TAN: np.tan, OP_EXP: np.exp,
    OP_SINH: np.sinh, OP_COSH: np.cosh,
}


def run(op, start, count, args, param, outputs, inputs, out):
    npts = inputs.shape[1]
    if npts == 0 or len(op) == 0:
        return OK, -1
    reg = [None] * len(op)
    with np.errstate(all="ignore"):
        for i in range(len(op)):
            code = op[i]
            a = start[i]
            if code == OP_CONST:
                reg[i] = np.full(npts, param[i])
            elif code == OP_VAR:
                reg[i] = inputs[a]
            elif code == OP_ADD:
                s = reg[args[a]] + reg[args[a + 1]]
                for j in range(a + 2, a + count[i]):
                    s = s + reg[args[j]]
                reg[i] = s
            elif code == OP_MUL:
                s = reg[args[a]] * reg[args[a + 1]]
                for j in range(a + 2, a + count[i]):
                    s = s * reg[args[j]]
                reg[i] = s
            else:
                x = reg[args[a]]
                if code == OP_POWI:
                    e = int(param[i])
                    if e < 0 and np.any(x == 0.0):
                        return ERR_DOMAIN, i
                    reg[i] = x ** float(e) if abs(e) > 3 else _small_pow(x, e)
                elif code == OP_POWR:
                    if np.any(x < 0.0) or (param[i] < 0 and np.any(x == 0.0)):
                        return ERR_DOMAIN, i
                    reg[i] = np.power(x, param[i])
                elif code == OP_SQRT:
                    if np.any(x < 0.0):
                        return ERR_DOMAIN, i
                    reg[i] = np.sqrt(x)
                elif code == OP_RSQRT:
                    if np.any(x <= 0.0):
                        return ERR_DOMAIN, i
                    reg[i] = 1.0 / np.sqrt(x)
                elif code == OP_LOG:
                    if np.any(x <= 0.0):
                        return ERR_DOMAIN, i
                    reg[i] = np.log(x)
                else:
                    reg[i] = _UNARY[code](x)
        for j, o in enumerate(outputs):
            v = reg[o]
            if not np.all(np.isfinite(v)):
                return ERR_NONFINITE, o
            out[j] = v
    return OK, -1


def _small_pow(x, e):
    if e == 2:
        return x * x
    if e == 3:
        return x * x * x
    if e == -1:
        return 1.0 / x
    if e == -2:
        return 1.0 / (x * x)
    if e == -3:
        return 1.0 / (x * x * x)
    return x ** float(e)
