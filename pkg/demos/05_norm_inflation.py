"""Norm inflation from lacunary data.

u_0 = sum_n 2^{-4n sigma} psi cos((33/24) 2^{4n} x) has bounded B^sigma_(2,inf)
norm, but u_0^2 feeds block 4n with weight exactly 2^{-4n sigma}.  At
t_n = 0.1 * 2^{-4n} the change in that block stays fixed in B^sigma.
The full norm of the truncated series still vanishes as t -> 0, so both
columns are printed.
"""

from fwlab import default_config, run_illposed

rep = run_illposed(default_config("illposed"))
print(f"{'n':>2} {'t_n':>10} {'own block':>10} {'full norm':>10} {'rem/t^2':>8}")
for r in rep.rows:
    print(f"{r['n']:>2} {r['t']:>10.3e} {r['block_lower_bound']:>10.3e} {r['inflation']:>10.3e} "
          f"{r['remainder_ratio']:>8.4f}")
for name, ok in rep.verdicts.items():
    print(f"{'pass' if ok else 'FAIL'}  {name}")
