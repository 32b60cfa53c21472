"""
--plot 的 SVG 输出，全部从已经写好的 CSV 读数据，不碰数值流程
"""
import csv
from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use('Agg')
import matplotlib.pyplot as plt  # noqa: E402

plt.rcParams['svg.hashsalt'] = 'neurosim'  # 固定 SVG 里的 id


def _read_csv(path: Path) -> tuple[list[str], list[list[str]]]:
    with path.open(newline='', encoding='utf-8') as f:
        rows = list(csv.reader(f))
    return rows[0], rows[1:]


def _save(fig, path: Path) -> Path:
    fig.tight_layout()
    fig.savefig(path, format='svg', metadata={'Date': None})
    plt.close(fig)
    return path


def plot_traces(csv_path: Path, svg_path: Path) -> Path:
    _, rows = _read_csv(csv_path)
    series: dict[str, tuple[list[float], list[float]]] = defaultdict(lambda: ([], []))
    for t, signal_id, value in rows:
        series[signal_id][0].append(float(t))
        series[signal_id][1].append(float(value))
    fig, ax = plt.subplots(figsize=(8, 5))
    for signal_id, (times, values) in sorted(series.items()):
        ax.plot(times, values, lw=1, label=signal_id)
    ax.set_xlabel('time (s)')
    ax.set_ylabel('current (A)')
    ax.legend(fontsize=8)
    ax.grid(True, alpha=0.3)
    return _save(fig, svg_path)


def plot_tau_table(csv_path: Path, svg_path: Path) -> Path:
    _, rows = _read_csv(csv_path)
    i_tau = [float(r[0]) for r in rows]
    fig, ax = plt.subplots(figsize=(7, 5))
    ax.loglog(i_tau, [float(r[1]) for r in rows], 'k--', label='C·U_T/(κ·I_tau)')
    ax.loglog(i_tau, [float(r[2]) for r in rows], 'o-', label='fitted')
    ax.set_xlabel('I_tau (A)')
    ax.set_ylabel('tau (s)')
    ax.legend()
    ax.grid(True, which='both', alpha=0.3)
    return _save(fig, svg_path)


def plot_fi(csv_paths: list[Path], svg_path: Path) -> Path:
    fig, ax = plt.subplots(figsize=(7, 5))
    for path in csv_paths:
        _, rows = _read_csv(path)
        ax.plot([float(r[0]) for r in rows], [float(r[1]) for r in rows], 'o-', ms=3, label=path.stem)
    ax.set_xlabel('I_in (A)')
    ax.set_ylabel('rate (Hz)')
    ax.legend(fontsize=8)
    ax.grid(True, alpha=0.3)
    return _save(fig, svg_path)


def plot_energy(csv_path: Path, svg_path: Path) -> Path:
    _, rows = _read_csv(csv_path)
    fig, ax = plt.subplots(figsize=(7, 5))
    ax.loglog([float(r[0]) for r in rows], [float(r[1]) for r in rows])
    ax.set_xlabel('frequency (Hz)')
    ax.set_ylabel('energy per spike (pJ)')
    ax.grid(True, which='both', alpha=0.3)
    return _save(fig, svg_path)


def plot_histogram(csv_path: Path, svg_path: Path) -> Path:
    _, rows = _read_csv(csv_path)
    lows = [float(r[0]) for r in rows]
    widths = [float(r[1]) - float(r[0]) for r in rows]
    fig, ax = plt.subplots(figsize=(7, 5))
    ax.bar(lows, [int(r[2]) for r in rows], width=widths, align='edge', edgecolor='white')
    ax.set_xlabel('firing rate (Hz)')
    ax.set_ylabel('count')
    ax.grid(True, alpha=0.3)
    return _save(fig, svg_path)
