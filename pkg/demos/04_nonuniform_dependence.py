"""Two data sequences that merge while their solutions do not.

w^n_0 is a high-frequency wave of unit B^s size and u^n_0 = w^n_0 + v^n_0
adds a tiny low-frequency bump.  The data distance halves with each n, yet
after time t the solutions stay about t apart because v transports w.
"""

from fwlab import default_config, run_nonuniform

rep = run_nonuniform(default_config("nonuniform", grid_n=2**16, n_min=4, n_max=7, t=(0.1,)))
print(f"{'n':>3} {'||v_0||':>10} {'D(t)/t':>9}")
for row in rep.rows:
    print(f"{row['n']:>3} {row['initial_distance']:>10.3e} {row['distance_over_t']:>9.4f}")
print(f"interaction floor ||v d_x w||: {rep.derived['interaction_floor']:.4f}")
print("note:", rep.notes[0])
