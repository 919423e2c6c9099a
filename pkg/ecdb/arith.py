#
# Module of exact integer arithmetic: factorization, residues, roots, and primes.
#   Last Modified: Add root counting for polynomials mod p.
#
from functools import lru_cache
from math import isqrt

from sympy import factorint, integer_nthroot, isprime, legendre_symbol, multiplicity, primerange
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_from_int_poly, gf_gcd, gf_pow_mod, gf_sub


FACTOR_LIMIT = 2**127                  # all discriminants in scope are below this


def count_roots_mod_p (coeffs, p):
  """
  Return the number of distinct roots mod p of the integer polynomial whose
  coefficients are given from the highest degree down. A polynomial which
  vanishes identically mod p has p roots.
  """
  f = gf_from_int_poly([int(c) for c in coeffs], p)
  if (not f):                          # every residue is a root
    return p
  if (len(f) == 1):                    # nonzero constant
    return 0
  x = [ZZ(1), ZZ(0)]
  x_to_p = gf_pow_mod(x, p, f, p, ZZ)
  common = gf_gcd(f, gf_sub(x_to_p, x, p, ZZ), p, ZZ)
  return len(common) - 1


def factorize (n):
  """
  Return the factorization of |n| as a tuple of (prime, exponent) pairs, sorted by prime.
  The units 1 and -1 have the empty factorization.
  Raises ValueError for zero or for integers too large to factor here.
  """
  if (n == 0):
    raise ValueError("Cannot factor zero.")
  if (abs(n) >= FACTOR_LIMIT):
    raise ValueError(f"Integer is too large to factor: |n| must be less than 2^127, got {n}.")
  return tuple((int(p), int(e)) for p, e in sorted(factorint(abs(n)).items()))


def has_root_mod_p (coeffs, p):
  "Tell whether the integer polynomial (highest degree first) has a root mod p."
  return count_roots_mod_p(coeffs, p) > 0


def integer_nth_root (n, k):
  "Return floor(n^(1/k)) for a nonnegative integer n and a positive integer k."
  if (n < 0):
    raise ValueError(f"Root argument must be nonnegative, got {n}.")
  if (k < 1):
    raise ValueError(f"Root index must be a positive integer, got {k}.")
  root, _ = integer_nthroot(n, k)
  return int(root)


def is_prime (n):
  "Tell whether n is prime (deterministic for every n below 2^64)."
  return bool(isprime(n))


def is_square (n):
  "Tell whether the integer n is a perfect square."
  return (n >= 0) and (isqrt(n)**2 == n)


def legendre (a, p):
  """
  Return the Legendre symbol (a/p) as -1, 0, or +1 for an odd prime p.
  Raises ValueError if p is even or composite.
  """
  if ((p % 2 == 0) or (not is_prime(p))):
    raise ValueError(f"Legendre symbol modulus must be an odd prime, got {p}.")
  return int(legendre_symbol(a % p, p))


def primes_up_to (limit):
  "Generator of the primes p with 2 <= p <= limit, in ascending order."
  for p in primerange(2, limit + 1):
    yield int(p)


@lru_cache(maxsize=1024)
def small_primes (limit):
  "Return a cached tuple of the primes up to the given (small) limit."
  return tuple(primes_up_to(limit))


def valuation (n, p):
  "Return the exponent of the prime p in the nonzero integer n."
  if (n == 0):
    raise ValueError("The valuation of zero is infinite.")
  return int(multiplicity(p, abs(n)))
