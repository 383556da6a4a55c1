"""Per-ray kernels: primary rays, triangle tests, nearest-hit search, shading.

Array layouts (all float64 unless noted):

* ``tris``    (n, 9)  v0, v1, v2 of each triangle, object-major order
* ``normals`` (n, 3)  unit geometric normals, ``cross(v1 - v0, v2 - v0)``
* ``tri_mat`` (n,)    int64 material row of each triangle
* ``mats``    (m, 8)  diffuse rgb, specular rgb, shininess, reflectivity
* ``lights``  (l, 6)  position xyz, intensity rgb
* ``env``     (6,)    ambient rgb, background rgb
* ``bounds``  (k, 6)  BVH node min xyz, max xyz (k == 0 selects linear scan)
* ``links``   (k, 5)  int64 left, right, first, count, split axis; leaf iff count > 0
* ``order``   (n,)    int64 triangle ids in leaf order
* ``cam``     (14,)   position, forward, right, true up, half width, half height

``stats`` is an int64 counter array owned by the caller, see ``STAT_*``.
"""

import math

import numpy as np

from ._jit import kernel

STAT_TESTS = 0
STAT_NODES = 1
STAT_REFLECTIONS = 2
STAT_PRIMARY_TESTS = 3
STAT_SHADOW_RAYS = 4
STAT_PRIMARY_RAYS = 5
N_STATS = 6

STACK_SIZE = 128
# relative widening of slab intervals; conservative visits never change the answer
SLAB_SLACK = 1e-9
DET_EPS = 1e-12
NO_HIT = -1
QUERY = -2


def new_stats():
    return np.zeros(N_STATS, dtype=np.int64)


def new_stack():
    return np.empty(STACK_SIZE, dtype=np.int64)


@kernel
def primary_ray(cam, px, py, width, height):
    sx = (2.0 * (px + 0.5) / width - 1.0) * cam[12]
    sy = (1.0 - 2.0 * (py + 0.5) / height) * cam[13]
    dx = cam[3] + sx * cam[6] + sy * cam[9]
    dy = cam[4] + sx * cam[7] + sy * cam[10]
    dz = cam[5] + sx * cam[8] + sy * cam[11]
    inv = 1.0 / math.sqrt(dx * dx + dy * dy + dz * dz)
    return cam[0], cam[1], cam[2], dx * inv, dy * inv, dz * inv


@kernel
def intersect_tri(tris, i, ox, oy, oz, dx, dy, dz, t_min):
    """Moller-Trumbore test; returns (t, u, v) with t = inf on a miss."""
    ax = tris[i, 0]
    ay = tris[i, 1]
    az = tris[i, 2]
    e1x = tris[i, 3] - ax
    e1y = tris[i, 4] - ay
    e1z = tris[i, 5] - az
    e2x = tris[i, 6] - ax
    e2y = tris[i, 7] - ay
    e2z = tris[i, 8] - az
    px = dy * e2z - dz * e2y
    py = dz * e2x - dx * e2z
    pz = dx * e2y - dy * e2x
    det = e1x * px + e1y * py + e1z * pz
    scale = math.sqrt((e1x * e1x + e1y * e1y + e1z * e1z) * (e2x * e2x + e2y * e2y + e2z * e2z))
    if abs(det) <= DET_EPS * scale:
        return math.inf, 0.0, 0.0
    inv = 1.0 / det
    sx = ox - ax
    sy = oy - ay
    sz = oz - az
    u = (sx * px + sy * py + sz * pz) * inv
    if u < 0.0 or u > 1.0:
        return math.inf, 0.0, 0.0
    qx = sy * e1z - sz * e1y
    qy = sz * e1x - sx * e1z
    qz = sx * e1y - sy * e1x
    v = (dx * qx + dy * qy + dz * qz) * inv
    if v < 0.0 or u + v > 1.0:
        return math.inf, 0.0, 0.0
    t = (e2x * qx + e2y * qy + e2z * qz) * inv
    if t > t_min:
        return t, u, v
    return math.inf, 0.0, 0.0


@kernel
def _slab_axis(lo, hi, o, d, inv, tnear, tfar):
    if d == 0.0:
        if o < lo or o > hi:
            return 1.0, -1.0
        return tnear, tfar
    t0 = (lo - o) * inv
    t1 = (hi - o) * inv
    if t0 > t1:
        t0, t1 = t1, t0
    if t0 > tnear:
        tnear = t0
    if t1 < tfar:
        tfar = t1
    return tnear, tfar


@kernel
def slab(bounds, k, ox, oy, oz, dx, dy, dz, ix, iy, iz):
    """Entry/exit parameters of the ray against node ``k``'s box (empty if tnear > tfar)."""
    tn, tf = _slab_axis(bounds[k, 0], bounds[k, 3], ox, dx, ix, -math.inf, math.inf)
    tn, tf = _slab_axis(bounds[k, 1], bounds[k, 4], oy, dy, iy, tn, tf)
    tn, tf = _slab_axis(bounds[k, 2], bounds[k, 5], oz, dz, iz, tn, tf)
    return tn, tf


@kernel
def _inverse(d):
    if d == 0.0:
        return math.inf
    return 1.0 / d


@kernel
def _widen(t):
    return t + SLAB_SLACK * abs(t) + 1e-300


@kernel
def nearest(tris, bounds, links, order, ox, oy, oz, dx, dy, dz, t_min, stack, stats):
    """Nearest triangle with t > t_min; ties go to the smaller triangle id.

    Returns (triangle id, t), or (NO_HIT, inf).
    """
    best_t = math.inf
    best_i = NO_HIT
    if links.shape[0] == 0:
        for i in range(tris.shape[0]):
            stats[STAT_TESTS] += 1
            t, u, v = intersect_tri(tris, i, ox, oy, oz, dx, dy, dz, t_min)
            if t < best_t:
                best_t = t
                best_i = i
        return best_i, best_t

    ix = _inverse(dx)
    iy = _inverse(dy)
    iz = _inverse(dz)
    stack[0] = 0
    sp = 1
    while sp > 0:
        sp -= 1
        node = stack[sp]
        stats[STAT_NODES] += 1
        tn, tf = slab(bounds, node, ox, oy, oz, dx, dy, dz, ix, iy, iz)
        tf = _widen(tf)
        if tn > tf or tf < t_min or tn > _widen(best_t):
            continue
        count = links[node, 3]
        if count > 0:
            first = links[node, 2]
            for j in range(first, first + count):
                i = order[j]
                stats[STAT_TESTS] += 1
                t, u, v = intersect_tri(tris, i, ox, oy, oz, dx, dy, dz, t_min)
                if t < best_t or (t == best_t and t < math.inf and i < best_i):
                    best_t = t
                    best_i = i
        else:
            axis = links[node, 4]
            d_axis = dx if axis == 0 else (dy if axis == 1 else dz)
            near = links[node, 0]
            far = links[node, 1]
            if d_axis < 0.0:
                near, far = far, near
            stack[sp] = far
            stack[sp + 1] = near
            sp += 2
    return best_i, best_t


@kernel
def occluded(tris, bounds, links, order, ox, oy, oz, dx, dy, dz, t_min, t_max, stack, stats):
    """True if any triangle is hit with t_min < t < t_max."""
    if links.shape[0] == 0:
        for i in range(tris.shape[0]):
            stats[STAT_TESTS] += 1
            t, u, v = intersect_tri(tris, i, ox, oy, oz, dx, dy, dz, t_min)
            if t < t_max:
                return True
        return False

    ix = _inverse(dx)
    iy = _inverse(dy)
    iz = _inverse(dz)
    limit = _widen(t_max)
    stack[0] = 0
    sp = 1
    while sp > 0:
        sp -= 1
        node = stack[sp]
        stats[STAT_NODES] += 1
        tn, tf = slab(bounds, node, ox, oy, oz, dx, dy, dz, ix, iy, iz)
        tf = _widen(tf)
        if tn > tf or tf < t_min or tn > limit:
            continue
        count = links[node, 3]
        if count > 0:
            first = links[node, 2]
            for j in range(first, first + count):
                stats[STAT_TESTS] += 1
                t, u, v = intersect_tri(tris, order[j], ox, oy, oz, dx, dy, dz, t_min)
                if t < t_max:
                    return True
        else:
            stack[sp] = links[node, 0]
            stack[sp + 1] = links[node, 1]
            sp += 2
    return False


@kernel
def trace_path(
    tris, normals, tri_mat, mats, lights, env, bounds, links, order,
    ox, oy, oz, dx, dy, dz, depth, t_min, bias, first_i, first_t, stack, scratch, stats,
):
    """Whitted trace of one ray, returning linear (r, g, b).

    Pass ``first_i = QUERY`` to search for the first hit, or a known triangle
    id and its ``first_t`` to shade that hit directly. The reflection chain is
    unrolled into ``scratch`` (at least depth + 1 rows of 4) and folded back
    to front, which reproduces the nested ``local + k * trace(...)`` sums.
    """
    segments = 0
    remaining = depth
    while True:
        if segments == 0 and first_i != QUERY:
            i = first_i
            t = first_t
        else:
            before = stats[STAT_TESTS]
            i, t = nearest(tris, bounds, links, order, ox, oy, oz, dx, dy, dz, t_min, stack, stats)
            if segments == 0:
                stats[STAT_PRIMARY_TESTS] += stats[STAT_TESTS] - before
        if i < 0:
            scratch[segments, 0] = env[3]
            scratch[segments, 1] = env[4]
            scratch[segments, 2] = env[5]
            scratch[segments, 3] = 0.0
            segments += 1
            break

        px = ox + t * dx
        py = oy + t * dy
        pz = oz + t * dz
        nx = normals[i, 0]
        ny = normals[i, 1]
        nz = normals[i, 2]
        if nx * dx + ny * dy + nz * dz > 0.0:
            nx = -nx
            ny = -ny
            nz = -nz
        m = tri_mat[i]
        cr = env[0] * mats[m, 0]
        cg = env[1] * mats[m, 1]
        cb = env[2] * mats[m, 2]
        sox = px + bias * nx
        soy = py + bias * ny
        soz = pz + bias * nz
        for k in range(lights.shape[0]):
            sdx = lights[k, 0] - sox
            sdy = lights[k, 1] - soy
            sdz = lights[k, 2] - soz
            sdist = math.sqrt(sdx * sdx + sdy * sdy + sdz * sdz)
            if sdist == 0.0:
                continue
            stats[STAT_SHADOW_RAYS] += 1
            if occluded(tris, bounds, links, order, sox, soy, soz,
                        sdx / sdist, sdy / sdist, sdz / sdist, t_min, sdist, stack, stats):
                continue
            lx = lights[k, 0] - px
            ly = lights[k, 1] - py
            lz = lights[k, 2] - pz
            ldist = math.sqrt(lx * lx + ly * ly + lz * lz)
            lx /= ldist
            ly /= ldist
            lz /= ldist
            ndl = nx * lx + ny * ly + nz * lz
            diff = max(0.0, ndl)
            rx = 2.0 * ndl * nx - lx
            ry = 2.0 * ndl * ny - ly
            rz = 2.0 * ndl * nz - lz
            spec = max(0.0, -(rx * dx + ry * dy + rz * dz)) ** mats[m, 6]
            cr += mats[m, 0] * lights[k, 3] * diff + mats[m, 3] * lights[k, 3] * spec
            cg += mats[m, 1] * lights[k, 4] * diff + mats[m, 4] * lights[k, 4] * spec
            cb += mats[m, 2] * lights[k, 5] * diff + mats[m, 5] * lights[k, 5] * spec
        refl = mats[m, 7]
        scratch[segments, 0] = cr
        scratch[segments, 1] = cg
        scratch[segments, 2] = cb
        scratch[segments, 3] = refl
        segments += 1
        if remaining <= 0 or refl == 0.0:
            scratch[segments - 1, 3] = 0.0
            break
        ddn = dx * nx + dy * ny + dz * nz
        dx = dx - 2.0 * ddn * nx
        dy = dy - 2.0 * ddn * ny
        dz = dz - 2.0 * ddn * nz
        ox = sox
        oy = soy
        oz = soz
        remaining -= 1
        stats[STAT_REFLECTIONS] += 1

    r = scratch[segments - 1, 0]
    g = scratch[segments - 1, 1]
    b = scratch[segments - 1, 2]
    for j in range(segments - 2, -1, -1):
        k = scratch[j, 3]
        r = scratch[j, 0] + k * r
        g = scratch[j, 1] + k * g
        b = scratch[j, 2] + k * b
    return r, g, b


@kernel
def render_rows(
    rows, width, height, cam, tris, normals, tri_mat, mats, lights, env, bounds, links, order,
    depth, t_min, bias, fb, stats,
):
    """Trace every pixel of the listed scanlines into ``fb`` (height, width, 3)."""
    stack = np.empty(STACK_SIZE, dtype=np.int64)
    scratch = np.empty((depth + 2, 4), dtype=np.float64)
    for row in rows:
        for x in range(width):
            ox, oy, oz, dx, dy, dz = primary_ray(cam, x, row, width, height)
            stats[STAT_PRIMARY_RAYS] += 1
            r, g, b = trace_path(
                tris, normals, tri_mat, mats, lights, env, bounds, links, order,
                ox, oy, oz, dx, dy, dz, depth, t_min, bias, QUERY, 0.0, stack, scratch, stats,
            )
            fb[row, x, 0] = r
            fb[row, x, 1] = g
            fb[row, x, 2] = b
