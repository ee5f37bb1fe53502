# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Register-machine evaluator for compiled expression DAGs (C kernel).

Same instruction set and error codes as ``axired._vm_py``.
"""
from libc.math cimport sin, cos, tan, exp, log, sinh, cosh, sqrt, pow, isfinite
from libc.stdlib cimport malloc, free

DEF OP_CONST = 0
DEF OP_VAR = 1
DEF OP_ADD = 2
DEF OP_MUL = 3
DEF OP_POWI = 4
DEF OP_POWR = 5
DEF OP_SQRT = 6
DEF OP_RSQRT = 7
DEF OP_SIN = 8
DEF OP_COS = 9
DEF OP_TAN = 10
DEF OP_EXP = 11
DEF OP_LOG = 12
DEF OP_SINH = 13
DEF OP_COSH = 14

# status codes
DEF OK = 0
DEF ERR_DOMAIN = 1
DEF ERR_NONFINITE = 2


cdef inline double _powi(double x, long n) nogil:
    cdef double r = 1.0
    cdef bint inv = n < 0
    if inv:
        n = -n
    while n:
        if n & 1:
            r *= x
        x *= x
        n >>= 1
    return 1.0 / r if inv else r


DEF BLOCK = 128


cdef int _run(const int* op, const int* start, const int* count, const int* args,
              const double* param, int n, const int* outputs, int nout,
              const double* inputs, int npts, double* out, double* reg,
              int* bad) nogil:
    """Node-major over blocks of BLOCK points; register i holds BLOCK values."""
    cdef int b0, m, i, j, k, a, c
    cdef double x, pr
    cdef double* r
    cdef const double* src
    for b0 in range(0, npts, BLOCK):
        m = npts - b0
        if m > BLOCK:
            m = BLOCK
        for i in range(n):
            r = reg + i * BLOCK
            a = start[i]
            c = op[i]
            if c == OP_CONST:
                pr = param[i]
                for k in range(m):
                    r[k] = pr
            elif c == OP_VAR:
                src = inputs + a * npts + b0
                for k in range(m):
                    r[k] = src[k]
            elif c == OP_ADD or c == OP_MUL:
                src = reg + args[a] * BLOCK
                for k in range(m):
                    r[k] = src[k]
                for j in range(a + 1, a + count[i]):
                    src = reg + args[j] * BLOCK
                    if c == OP_ADD:
                        for k in range(m):
                            r[k] += src[k]
                    else:
                        for k in range(m):
                            r[k] *= src[k]
            else:
                src = reg + args[a] * BLOCK
                pr = param[i]
                if c == OP_POWI:
                    if pr < 0:
                        for k in range(m):
                            if src[k] == 0.0:
                                bad[0] = i
                                return ERR_DOMAIN
                    if pr == 2:
                        for k in range(m):
                            r[k] = src[k] * src[k]
                    elif pr == -1:
                        for k in range(m):
                            r[k] = 1.0 / src[k]
                    else:
                        for k in range(m):
                            r[k] = _powi(src[k], <long>pr)
                elif c == OP_POWR:
                    for k in range(m):
                        x = src[k]
                        if x < 0.0 or (x == 0.0 and pr < 0):
                            bad[0] = i
                            return ERR_DOMAIN
                        r[k] = pow(x, pr)
                elif c == OP_SQRT or c == OP_RSQRT or c == OP_LOG:
                    for k in range(m):
                        x = src[k]
                        if x < 0.0 or (x == 0.0 and c != OP_SQRT):
                            bad[0] = i
                            return ERR_DOMAIN
                    if c == OP_SQRT:
                        for k in range(m):
                            r[k] = sqrt(src[k])
                    elif c == OP_RSQRT:
                        for k in range(m):
                            r[k] = 1.0 / sqrt(src[k])
                    else:
                        for k in range(m):
                            r[k] = log(src[k])
                elif c == OP_SIN:
                    for k in range(m):
                        r[k] = sin(src[k])
                elif c == OP_COS:
                    for k in range(m):
                        r[k] = cos(src[k])
                elif c == OP_TAN:
                    for k in range(m):
                        r[k] = tan(src[k])
                elif c == OP_EXP:
                    for k in range(m):
                        r[k] = exp(src[k])
                elif c == OP_SINH:
                    for k in range(m):
                        r[k] = sinh(src[k])
                elif c == OP_COSH:
                    for k in range(m):
                        r[k] = cosh(src[k])
        for j in range(nout):
            src = reg + outputs[j] * BLOCK
            for k in range(m):
                x = src[k]
                if not isfinite(x):
                    bad[0] = outputs[j]
                    return ERR_NONFINITE
                out[j * npts + b0 + k] = x
    return OK


def run(const int[::1] op, const int[::1] start, const int[::1] count,
        const int[::1] args, const double[::1] param, const int[::1] outputs,
        const double[:, ::1] inputs, double[:, ::1] out):
    """Evaluate the program at every column of ``inputs`` into ``out``.

    Returns ``(status, instruction)``; status 0 means success.
    """
    cdef int n = op.shape[0]
    cdef int npts = inputs.shape[1]
    cdef int nout = outputs.shape[0]
    cdef int bad = -1
    cdef int status
    cdef double* reg
    cdef const double* inp = NULL
    cdef const int* argp = NULL
    if npts == 0 or n == 0:
        return 0, -1
    if inputs.shape[0] > 0:
        inp = &inputs[0, 0]
    if args.shape[0] > 0:
        argp = &args[0]
    reg = <double*> malloc(n * BLOCK * sizeof(double))
    if reg == NULL:
        raise MemoryError()
    try:
        with nogil:
            status = _run(&op[0], &start[0], &count[0], argp, &param[0], n,
                          &outputs[0], nout, inp, npts, &out[0, 0], reg, &bad)
    finally:
        free(reg)
    return status, bad
