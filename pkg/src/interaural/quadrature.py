"""Adaptive 1-D quadrature with the behavior of QUADPACK's QAGS / QAGI.

Globally adaptive bisection driven by a 21-point Gauss-Kronrod rule,
accelerated by Wynn's epsilon algorithm, so integrable endpoint
singularities (``x**-0.5``, ``log x``) converge quickly.

Integrands must accept a 1-D float array and return an array of the same
shape; each rule application evaluates the 21 nodes in one call.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "QuadratureConfig",
    "QuadratureResult",
    "QuadratureError",
    "gk21",
    "integrate_finite",
    "integrate_semi_infinite",
    "integrate_breakpoints",
]

_EPMACH = np.finfo(float).eps
_UFLOW = np.finfo(float).tiny
_OFLOW = np.finfo(float).max

# Kronrod abscissae on [0, 1]; odd indices are the 10-point Gauss nodes.
_XGK = np.array([
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077208980597580,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
])
_WG = np.array([
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
])

# full symmetric node set: -x_0..-x_9, 0, x_9..x_0
_NODES = np.concatenate([-_XGK[:10], [0.0], _XGK[9::-1]])
_WK_FULL = np.concatenate([_WGK[:10], [_WGK[10]], _WGK[9::-1]])
_WG_FULL = np.zeros(21)
_WG_FULL[1:10:2] = _WG
_WG_FULL[11:20:2] = _WG[::-1]


class QuadratureError(RuntimeError):
    """An integral needed by a higher-level routine did not converge."""

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


@dataclass(frozen=True)
class QuadratureConfig:
    epsabs: float = 1e-10
    epsrel: float = 1e-8
    max_subintervals: int = 200

    def __post_init__(self):
        if self.epsabs < 0 or self.epsrel < 0:
            raise ValueError("tolerances must be non-negative")
        if self.epsabs == 0 and self.epsrel < max(50 * _EPMACH, 0.5e-28):
            raise ValueError("need epsabs > 0 or a usable epsrel")
        if self.max_subintervals < 1:
            raise ValueError("max_subintervals must be >= 1")


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    abs_error_estimate: float
    evaluations: int
    converged: bool
    status: int = 0
    """QUADPACK-style ier: 0 ok, 1 subdivision limit, 2 roundoff,
    3 bad integrand behavior, 4 extrapolation roundoff, 5 divergent."""

    def __float__(self):
        return self.value


DEFAULT_CONFIG = QuadratureConfig()


def gk21(f: Callable, a: float, b: float):
    """One 21-point Gauss-Kronrod application on [a, b].

    Returns ``(result, abserr, resabs, resasc)`` as in QUADPACK's dqk21:
    ``resabs`` approximates the integral of ``|f|`` and ``resasc`` that of
    ``|f - mean(f)|``.
    """
    centr = 0.5 * (a + b)
    hlgth = 0.5 * (b - a)
    dhlgth = abs(hlgth)
    fv = np.asarray(f(centr + hlgth * _NODES), dtype=float)
    if fv.shape != (21,):
        raise ValueError("integrand must map a length-21 array to length 21")
    resk = float(np.dot(_WK_FULL, fv))
    resg = float(np.dot(_WG_FULL, fv))
    reskh = resk * 0.5
    resabs = float(np.dot(_WK_FULL, np.abs(fv))) * dhlgth
    resasc = float(np.dot(_WK_FULL, np.abs(fv - reskh))) * dhlgth
    result = resk * hlgth
    abserr = abs((resk - resg) * hlgth)
    if resasc != 0.0 and abserr != 0.0:
        abserr = resasc * min(1.0, (200.0 * abserr / resasc) ** 1.5)
    if resabs > _UFLOW / (50.0 * _EPMACH):
        abserr = max(_EPMACH * 50.0 * resabs, abserr)
    if not math.isfinite(result):
        raise FloatingPointError(f"non-finite integrand value on [{a}, {b}]")
    return result, abserr, resabs, resasc


class _EpsilonTable:
    """Wynn epsilon extrapolation state (QUADPACK dqelg)."""

    LIMEXP = 50

    def __init__(self):
        self.tab = [0.0] * 53  # 1-based, entries 1..52
        self.n = 0
        self.res3la = [0.0, 0.0, 0.0]
        self.nres = 0

    def append(self, value: float):
        self.n += 1
        self.tab[self.n] = value

    def extrapolate(self):
        ep = self.tab
        n = self.n
        self.nres += 1
        abserr = _OFLOW
        result = ep[n]
        if n < 3:
            return result, max(abserr, 5.0 * _EPMACH * abs(result))
        ep[n + 2] = ep[n]
        newelm = (n - 1) // 2
        ep[n] = _OFLOW
        num = n
        k1 = n
        for i in range(1, newelm + 1):
            k2 = k1 - 1
            k3 = k1 - 2
            res = ep[k1 + 2]
            e0, e1, e2 = ep[k3], ep[k2], res
            e1abs = abs(e1)
            delta2 = e2 - e1
            err2 = abs(delta2)
            tol2 = max(abs(e2), e1abs) * _EPMACH
            delta3 = e1 - e0
            err3 = abs(delta3)
            tol3 = max(e1abs, abs(e0)) * _EPMACH
            if err2 <= tol2 and err3 <= tol3:
                # e0, e1, e2 agree to machine accuracy
                self.n = n
                return res, max(err2 + err3, 5.0 * _EPMACH * abs(res))
            e3 = ep[k1]
            ep[k1] = e1
            delta1 = e1 - e3
            err1 = abs(delta1)
            tol1 = max(e1abs, abs(e3)) * _EPMACH
            if err1 <= tol1 or err2 <= tol2 or err3 <= tol3:
                n = i + i - 1
                break
            ss = 1.0 / delta1 + 1.0 / delta2 - 1.0 / delta3
            if abs(ss * e1) <= 1e-4:
                n = i + i - 1
                break
            res = e1 + 1.0 / ss
            ep[k1] = res
            k1 -= 2
            error = err2 + abs(res - e2) + err3
            if error <= abserr:
                abserr = error
                result = res
        if n == self.LIMEXP:
            n = 2 * (self.LIMEXP // 2) - 1
        ib = 1 if num % 2 == 1 else 2
        for _ in range(newelm + 1):
            ep[ib] = ep[ib + 2]
            ib += 2
        if num != n:
            indx = num - n + 1
            for i in range(1, n + 1):
                ep[i] = ep[indx]
                indx += 1
        self.n = n
        if self.nres < 4:
            self.res3la[self.nres - 1] = result
            abserr = _OFLOW
        else:
            r3 = self.res3la
            abserr = abs(result - r3[2]) + abs(result - r3[1]) + abs(result - r3[0])
            r3[0], r3[1], r3[2] = r3[1], r3[2], result
        return result, max(abserr, 5.0 * _EPMACH * abs(result))


def _qags(f, a: float, b: float, cfg: QuadratureConfig) -> QuadratureResult:
    epsabs, epsrel, limit = cfg.epsabs, cfg.epsrel, cfg.max_subintervals
    alist = [a]
    blist = [b]
    rlist = [0.0]
    elist = [0.0]

    ier = 0
    ierro = 0
    result, abserr, defabs, resabs = gk21(f, a, b)
    dres = abs(result)
    errbnd = max(epsabs, epsrel * dres)
    last = 1
    rlist[0] = result
    elist[0] = abserr
    if abserr <= 100.0 * _EPMACH * defabs and abserr > errbnd:
        ier = 2
    if limit == 1:
        ier = 1
    if ier != 0 or (abserr <= errbnd and abserr != resabs) or abserr == 0.0:
        return _finish(result, abserr, last, ier)

    eps = _EpsilonTable()
    eps.append(result)
    errmax = abserr
    maxerr = 0
    area = result
    errsum = abserr
    abserr = _OFLOW
    nrmax = 1
    ktmin = 0
    extrap = False
    noext = False
    iroff1 = iroff2 = iroff3 = 0
    ksgn = 1 if dres >= (1.0 - 50.0 * _EPMACH) * defabs else -1
    small = erlarg = ertest = correc = 0.0
    order = [0]

    final = None
    for last in range(2, limit + 1):
        a1 = alist[maxerr]
        b1 = 0.5 * (alist[maxerr] + blist[maxerr])
        a2 = b1
        b2 = blist[maxerr]
        erlast = errmax
        area1, error1, _, defab1 = gk21(f, a1, b1)
        area2, error2, _, defab2 = gk21(f, a2, b2)
        area12 = area1 + area2
        erro12 = error1 + error2
        errsum = errsum + erro12 - errmax
        area = area + area12 - rlist[maxerr]
        if defab1 != error1 and defab2 != error2:
            if abs(rlist[maxerr] - area12) <= 1e-5 * abs(area12) and erro12 >= 0.99 * errmax:
                if extrap:
                    iroff2 += 1
                else:
                    iroff1 += 1
            if last > 10 and erro12 > errmax:
                iroff3 += 1
        errbnd = max(epsabs, epsrel * abs(area))
        if iroff1 + iroff2 >= 10 or iroff3 >= 20:
            ier = 2
        if iroff2 >= 5:
            ierro = 3
        if last == limit:
            ier = 1
        if max(abs(a1), abs(b2)) <= (1.0 + 100.0 * _EPMACH) * (abs(a2) + 1000.0 * _UFLOW):
            ier = 4

        # left half stays in slot maxerr, right half is appended
        alist.append(a2)
        blist.append(b2)
        rlist.append(area2)
        elist.append(error2)
        blist[maxerr] = b1
        rlist[maxerr] = area1
        elist[maxerr] = error1

        order = sorted(range(last), key=lambda i: -elist[i])
        nrmax = min(nrmax, last)
        maxerr = order[nrmax - 1]
        errmax = elist[maxerr]

        if errsum <= errbnd:
            final = "sum"
            break
        if ier != 0:
            break
        if last == 2:
            small = abs(b - a) * 0.375
            erlarg = errsum
            ertest = errbnd
            eps.append(area)
            continue
        if noext:
            continue
        erlarg -= erlast
        if abs(b1 - a1) > small:
            erlarg += erro12
        if not extrap:
            # keep bisecting until the largest interval is small
            if abs(blist[maxerr] - alist[maxerr]) > small:
                continue
            extrap = True
            nrmax = 2
        skip_extrapolation = False
        if ierro != 3 and erlarg > ertest:
            # first work on the large intervals still present
            jupbnd = last
            if last > 2 + limit // 2:
                jupbnd = limit + 3 - last
            for _ in range(nrmax, jupbnd + 1):
                if nrmax > last:
                    break
                maxerr = order[nrmax - 1]
                errmax = elist[maxerr]
                if abs(blist[maxerr] - alist[maxerr]) > small:
                    skip_extrapolation = True
                    break
                nrmax += 1
        if skip_extrapolation:
            continue

        eps.append(area)
        reseps, abseps = eps.extrapolate()
        ktmin += 1
        if ktmin > 5 and abserr < 1e-3 * errsum:
            ier = 5
        if abseps < abserr:
            ktmin = 0
            abserr = abseps
            result = reseps
            correc = erlarg
            ertest = max(epsabs, epsrel * abs(reseps))
            if abserr <= ertest:
                break
        if eps.n == 1:
            noext = True
        if ier == 5:
            break
        maxerr = order[0]
        errmax = elist[maxerr]
        nrmax = 1
        extrap = False
        small *= 0.5
        erlarg = errsum

    if final is None:
        final = _select(result, abserr, area, errsum, defabs, ksgn, ier, ierro, correc)
        if isinstance(final, tuple):
            result, abserr, ier = final
            return _finish(result, abserr, last, ier)
    # sum of the subinterval contributions
    result = math.fsum(rlist)
    abserr = errsum
    if ier > 2:
        ier -= 1
    return _finish(result, abserr, last, ier)


def _select(result, abserr, area, errsum, defabs, ksgn, ier, ierro, correc):
    """Choose between the extrapolated value and the plain sum (labels 100-130
    of dqagse). Returns ``"sum"`` or ``(result, abserr, ier)``."""
    if abserr == _OFLOW:
        return "sum"
    if ier + ierro != 0:
        if ierro == 3:
            abserr += correc
        if ier == 0:
            ier = 3
        if result != 0.0 and area != 0.0:
            if abserr / abs(result) > errsum / abs(area):
                return "sum"
        elif abserr > errsum:
            return "sum"
        elif area == 0.0:
            return (result, abserr, ier - 1 if ier > 2 else ier)
    # divergence test
    if area != 0.0 and not (ksgn == -1 and max(abs(result), abs(area)) <= defabs * 0.01):
        if 0.01 > result / area or result / area > 100.0 or errsum > abs(area):
            ier = 6
    if ier > 2:
        ier -= 1
    return (result, abserr, ier)


def _finish(result, abserr, last, ier):
    return result, abserr, 42 * last - 21, ier


def _package(raw, cfg) -> QuadratureResult:
    value, err, neval, ier = raw
    tol = max(cfg.epsabs, cfg.epsrel * abs(value))
    converged = ier == 0 and err <= tol and math.isfinite(value)
    return QuadratureResult(float(value), float(err), int(neval), bool(converged), int(ier))


def _as_vectorized(f, vectorized):
    if vectorized:
        return f
    return np.vectorize(f, otypes=[float])


def integrate_finite(f: Callable, a: float, b: float,
                     cfg: QuadratureConfig | None = None, *,
                     vectorized: bool = True) -> QuadratureResult:
    """Integrate ``f`` over the finite interval ``[a, b]`` (QAGS).

    Never raises on non-convergence; inspect ``converged`` / ``status``.
    """
    cfg = cfg or DEFAULT_CONFIG
    if not (math.isfinite(a) and math.isfinite(b)):
        raise ValueError("use integrate_semi_infinite for infinite limits")
    if a == b:
        return QuadratureResult(0.0, 0.0, 0, True)
    if a > b:
        res = integrate_finite(f, b, a, cfg, vectorized=vectorized)
        return QuadratureResult(-res.value, res.abs_error_estimate,
                                res.evaluations, res.converged, res.status)
    raw = _qags(_as_vectorized(f, vectorized), float(a), float(b), cfg)
    return _package(raw, cfg)


def integrate_semi_infinite(f: Callable, a: float,
                            cfg: QuadratureConfig | None = None, *,
                            upper: bool = True,
                            vectorized: bool = True) -> QuadratureResult:
    """Integrate ``f`` over ``[a, inf)`` (or ``(-inf, a]`` with ``upper=False``).

    The half line is mapped onto (0, 1] by ``x = a + (1 - t)/t`` and the
    transformed integrand handed to the finite routine (as QAGI does).
    """
    cfg = cfg or DEFAULT_CONFIG
    fv = _as_vectorized(f, vectorized)
    sign = 1.0 if upper else -1.0

    def mapped(t):
        x = a + sign * (1.0 - t) / t
        with np.errstate(over="ignore"):
            val = np.asarray(fv(x), dtype=float) / (t * t)
        # f decays to exactly 0 before 1/t^2 overflows for integrable f
        return np.where(np.isfinite(val), val, 0.0)

    raw = _qags(mapped, 0.0, 1.0, cfg)
    return _package(raw, cfg)


def integrate_breakpoints(f: Callable, points, cfg: QuadratureConfig | None = None,
                          *, vectorized: bool = True) -> QuadratureResult:
    """Sum of finite integrals over consecutive ``points``; either end may be
    ``+-inf``. Breakpoints put known kinks or peaks at interval ends."""
    pts = [float(p) for p in points]
    total = []
    err = 0.0
    neval = 0
    ok = True
    status = 0
    for lo, hi in zip(pts[:-1], pts[1:]):
        if lo == hi:
            continue
        if math.isinf(lo) and math.isinf(hi):
            raise ValueError("split doubly infinite ranges at a finite point")
        if math.isinf(hi):
            r = integrate_semi_infinite(f, lo, cfg, vectorized=vectorized)
        elif math.isinf(lo):
            r = integrate_semi_infinite(f, hi, cfg, upper=False, vectorized=vectorized)
        else:
            r = integrate_finite(f, lo, hi, cfg, vectorized=vectorized)
        total.append(r.value)
        err += r.abs_error_estimate
        neval += r.evaluations
        ok = ok and r.converged
        status = status or r.status
    value = math.fsum(total)
    return QuadratureResult(value, err, neval, ok, status)
