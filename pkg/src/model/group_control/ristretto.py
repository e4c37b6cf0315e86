# -*- coding: utf-8 -*-
"""
****************************************************
*              TrustRate Desk Backend              *
*            (c) 2023 Alexander Hering             *
****************************************************
"""
from typing import Optional, Tuple, List


# Points are extended twisted Edwards coordinates (X, Y, Z, T) with x = X/Z, y = Y/Z, xy = T/Z.
Point = Tuple[int, int, int, int]

P = 2 ** 255 - 19
Q = 2 ** 252 + 27742317777372353535851937790883648493
D = (-121665 * pow(121666, -1, P)) % P
SQRT_M1 = pow(2, (P - 1) // 4, P)


def is_negative(value: int) -> bool:
    """
    Function for checking the sign convention of a field element.
    :param value: Field element.
    :return: True, if the canonical representative is odd.
    """
    return bool((value % P) & 1)


def absolute(value: int) -> int:
    """
    Function for getting the non-negative representative of a field element.
    :param value: Field element.
    :return: Non-negative representative.
    """
    value %= P
    return (-value) % P if value & 1 else value


def sqrt_ratio_m1(u: int, v: int) -> Tuple[bool, int]:
    """
    Function for computing the non-negative square root of u/v or of SQRT_M1*u/v.
    :param u: Numerator.
    :param v: Denominator.
    :return: Tuple of a flag, declaring whether u/v was square, and the root.
    """
    u %= P
    v %= P
    v3 = v * v % P * v % P
    v7 = v3 * v3 % P * v % P
    r = u * v3 % P * pow(u * v7 % P, (P - 5) // 8, P) % P
    check = v * r % P * r % P
    correct_sign = check == u
    flipped_sign = check == (-u) % P
    flipped_sign_i = check == (-u * SQRT_M1) % P
    if flipped_sign or flipped_sign_i:
        r = r * SQRT_M1 % P
    return correct_sign or flipped_sign, absolute(r)


def _root(value: int) -> int:
    """
    Internal function for computing the non-negative square root of a square field element.
    :param value: Square field element.
    :return: Non-negative root.
    """
    was_square, root = sqrt_ratio_m1(value, 1)
    assert was_square
    return root


SQRT_AD_MINUS_ONE = (-_root((-D - 1) % P)) % P
INVSQRT_A_MINUS_D = sqrt_ratio_m1(1, (-1 - D) % P)[1]
ONE_MINUS_D_SQ = (1 - D * D) % P
D_MINUS_ONE_SQ = (D - 1) * (D - 1) % P
D2 = 2 * D % P

IDENTITY: Point = (0, 1, 1, 0)


def _base_point() -> Point:
    """
    Internal function for deriving the Ed25519 base point with y = 4/5 and even x.
    :return: Base point.
    """
    y = 4 * pow(5, -1, P) % P
    was_square, x = sqrt_ratio_m1((y * y - 1) % P, (D * y * y + 1) % P)
    assert was_square
    return (x, y, 1, x * y % P)


BASE: Point = _base_point()


"""
Edwards arithmetic
"""


def add(p1: Point, p2: Point) -> Point:
    """
    Function for adding two points (unified formula for a = -1).
    :param p1: First point.
    :param p2: Second point.
    :return: Sum.
    """
    x1, y1, z1, t1 = p1
    x2, y2, z2, t2 = p2
    a = (y1 - x1) * (y2 - x2) % P
    b = (y1 + x1) * (y2 + x2) % P
    c = t1 * D2 % P * t2 % P
    d = 2 * z1 * z2 % P
    e, f, g, h = b - a, d - c, d + c, b + a
    return (e * f % P, g * h % P, f * g % P, e * h % P)


def double(point: Point) -> Point:
    """
    Function for doubling a point.
    :param point: Point.
    :return: Doubled point.
    """
    x1, y1, z1, _ = point
    a = x1 * x1 % P
    b = y1 * y1 % P
    c = 2 * z1 * z1 % P
    h = a + b
    e = h - (x1 + y1) * (x1 + y1) % P
    g = a - b
    f = c + g
    return (e * f % P, g * h % P, f * g % P, e * h % P)


def negate(point: Point) -> Point:
    """
    Function for negating a point.
    :param point: Point.
    :return: Negated point.
    """
    x, y, z, t = point
    return ((-x) % P, y, z, (-t) % P)


def equals(p1: Point, p2: Point) -> bool:
    """
    Function for comparing two points as Ristretto elements.
    :param p1: First point.
    :param p2: Second point.
    :return: True, if both points encode the same group element.
    """
    x1, y1, _, _ = p1
    x2, y2, _, _ = p2
    return (x1 * y2 - y1 * x2) % P == 0 or (y1 * y2 - x1 * x2) % P == 0


def multiply(point: Point, scalar: int) -> Point:
    """
    Function for scalar multiplication with a fixed 4-bit window.
    :param point: Point.
    :param scalar: Scalar, reduced modulo the group order.
    :return: Product.
    """
    scalar %= Q
    if scalar == 0:
        return IDENTITY
    table = [IDENTITY, point]
    for _ in range(14):
        table.append(add(table[-1], point))
    result = IDENTITY
    for shift in range((scalar.bit_length() + 3) // 4 * 4 - 4, -4, -4):
        result = double(double(double(double(result))))
        nibble = (scalar >> shift) & 15
        if nibble:
            result = add(result, table[nibble])
    return result


def _straus(points: List[Point], scalars: List[int]) -> Point:
    """
    Internal function for short multi-exponentiations with interleaved 4-bit windows.
    :param points: Points.
    :param scalars: Scalars.
    :return: Sum of products.
    """
    tables = []
    for point in points:
        table = [IDENTITY, point]
        for _ in range(14):
            table.append(add(table[-1], point))
        tables.append(table)
    top = max(scalar.bit_length() for scalar in scalars)
    result = IDENTITY
    for shift in range((top + 3) // 4 * 4 - 4, -4, -4):
        result = double(double(double(double(result))))
        for table, scalar in zip(tables, scalars):
            nibble = (scalar >> shift) & 15
            if nibble:
                result = add(result, table[nibble])
    return result


def _pippenger(points: List[Point], scalars: List[int]) -> Point:
    """
    Internal function for long multi-exponentiations with bucket accumulation.
    :param points: Points.
    :param scalars: Scalars.
    :return: Sum of products.
    """
    width = max(2, len(points).bit_length() - 2)
    mask = (1 << width) - 1
    top = max(scalar.bit_length() for scalar in scalars)
    result = IDENTITY
    for window in range((top + width - 1) // width - 1, -1, -1):
        for _ in range(width):
            result = double(result)
        buckets: List[Optional[Point]] = [None] * mask
        shift = window * width
        for point, scalar in zip(points, scalars):
            index = (scalar >> shift) & mask
            if index:
                bucket = buckets[index - 1]
                buckets[index - 1] = point if bucket is None else add(bucket, point)
        running = IDENTITY
        window_sum = IDENTITY
        for bucket in reversed(buckets):
            if bucket is not None:
                running = add(running, bucket)
            window_sum = add(window_sum, running)
        result = add(result, window_sum)
    return result


def multi_multiply(points: List[Point], scalars: List[int]) -> Point:
    """
    Function for computing sum(scalar_i * point_i).
    :param points: Points.
    :param scalars: Scalars.
    :return: Sum of products.
    """
    pairs = [(point, scalar % Q) for point, scalar in zip(points, scalars)]
    pairs = [pair for pair in pairs if pair[1]]
    if not pairs:
        return IDENTITY
    if len(pairs) == 1:
        return multiply(*pairs[0])
    points = [pair[0] for pair in pairs]
    scalars = [pair[1] for pair in pairs]
    if len(pairs) <= 16:
        return _straus(points, scalars)
    return _pippenger(points, scalars)


"""
Ristretto255 encoding
"""


def encode(point: Point) -> bytes:
    """
    Function for encoding a point as canonical 32-byte Ristretto255 string.
    :param point: Point.
    :return: Encoding.
    """
    x0, y0, z0, t0 = point
    u1 = (z0 + y0) * (z0 - y0) % P
    u2 = x0 * y0 % P
    _, invsqrt = sqrt_ratio_m1(1, u1 * u2 % P * u2 % P)
    den1 = invsqrt * u1 % P
    den2 = invsqrt * u2 % P
    z_inv = den1 * den2 % P * t0 % P
    if is_negative(t0 * z_inv):
        x, y = y0 * SQRT_M1 % P, x0 * SQRT_M1 % P
        den_inv = den1 * INVSQRT_A_MINUS_D % P
    else:
        x, y = x0, y0
        den_inv = den2
    if is_negative(x * z_inv):
        y = (-y) % P
    s = absolute(den_inv * (z0 - y))
    return s.to_bytes(32, "little")


def decode(data: bytes) -> Optional[Point]:
    """
    Function for decoding a 32-byte Ristretto255 string.
    :param data: Encoding.
    :return: Point, if the encoding is canonical and valid, else None.
    """
    if len(data) != 32:
        return None
    s = int.from_bytes(data, "little")
    if s >= P or is_negative(s):
        return None
    ss = s * s % P
    u1 = (1 - ss) % P
    u2 = (1 + ss) % P
    u2_sqr = u2 * u2 % P
    v = (-(D * u1 % P * u1) - u2_sqr) % P
    was_square, invsqrt = sqrt_ratio_m1(1, v * u2_sqr % P)
    den_x = invsqrt * u2 % P
    den_y = invsqrt * den_x % P * v % P
    x = absolute(2 * s * den_x)
    y = u1 * den_y % P
    t = x * y % P
    if not was_square or is_negative(t) or y == 0:
        return None
    return (x, y, 1, t)


def _elligator(t: int) -> Point:
    """
    Internal function mapping a field element onto the group.
    :param t: Field element.
    :return: Point.
    """
    r = SQRT_M1 * t % P * t % P
    u = (r + 1) * ONE_MINUS_D_SQ % P
    v = (-1 - r * D) * (r + D) % P
    was_square, s = sqrt_ratio_m1(u, v)
    if not was_square:
        s = (-absolute(s * t)) % P
        c = r
    else:
        c = P - 1
    n = (c * (r - 1) % P * D_MINUS_ONE_SQ - v) % P
    w0 = 2 * s * v % P
    w1 = n * SQRT_AD_MINUS_ONE % P
    w2 = (1 - s * s) % P
    w3 = (1 + s * s) % P
    return (w0 * w3 % P, w2 * w1 % P, w1 * w3 % P, w0 * w2 % P)


def from_uniform_bytes(data: bytes) -> Point:
    """
    Function for mapping 64 uniform bytes onto the group.
    :param data: 64 bytes.
    :return: Point.
    """
    mask = (1 << 255) - 1
    t1 = (int.from_bytes(data[:32], "little") & mask) % P
    t2 = (int.from_bytes(data[32:64], "little") & mask) % P
    return add(_elligator(t1), _elligator(t2))
