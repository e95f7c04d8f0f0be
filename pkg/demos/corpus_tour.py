"""Classical, theta and almost-quantum values for every game in games/."""
from pathlib import Path

from xordgames.classical import classical_value
from xordgames.game import read_game
from xordgames.quantum import almost_quantum_value, theta_upper_bound

root = Path(__file__).resolve().parents[1] / "games"
print(f"{'game':<22}{'|E|':>4}{'gamma_c':>9}{'gamma_aq':>11}{'theta':>11}")
for path in sorted(root.glob("*.game")):
    g = read_game(path)
    cr = classical_value(g)
    aq = almost_quantum_value(g)
    th = theta_upper_bound(g)
    print(f"{path.stem:<22}{cr.edges:>4}{cr.gamma_c:>9}{aq.value:>11.5f}{th.value:>11.5f}")
