"""OBJ meshes, per-sample curvature tables and JSON geometry reports."""

from __future__ import annotations

import csv
import io
import json

import numpy as np

from .diameter import meridian_samples
from .invariants import geometry_report, grad_II_norm

CURVATURE_COLUMNS = (
    "s", "x", "rho", "region", "kappa_mu", "kappa_pi", "H", "K",
    "dkappa_mu", "dkappa_pi", "grad_II",
)


def _write(text, path):
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text


def to_obj(surface, meridian=128, around=64, path=None):
    """Triangulated surface as Wavefront OBJ text. Poles become triangle fans."""
    s = meridian_samples(surface, meridian)
    piece, p = surface.profile.locate(s)
    pos = np.empty((2, s.size))
    for idx in np.unique(piece):
        sel = piece == idx
        pos[:, sel] = surface.profile.position(int(idx), p[sel])
    x, rho = pos[0], np.abs(pos[1])
    pole = rho <= 1e-12 * max(1.0, float(np.max(rho)))
    theta = 2.0 * np.pi * np.arange(around) / around
    lines = [f"# {surface.label}"]
    index = []
    count = 0
    for xi, ri, is_pole in zip(x, rho, pole):
        if is_pole:
            lines.append(f"v {xi:.12g} 0 0")
            index.append([count + 1] * around)
            count += 1
        else:
            row = []
            for th in theta:
                lines.append(f"v {xi:.12g} {ri * np.cos(th):.12g} {ri * np.sin(th):.12g}")
                count += 1
                row.append(count)
            index.append(row)
    for a, b in zip(index[:-1], index[1:]):
        for j in range(around):
            k = (j + 1) % around
            tri = [(a[j], b[j], b[k]), (a[j], b[k], a[k])]
            for t in tri:
                if len(set(t)) == 3:
                    lines.append(f"f {t[0]} {t[1]} {t[2]}")
    return _write("\n".join(lines) + "\n", path)


def curvature_csv(surface, path=None):
    """Per-sample curvature table; columns in :data:`CURVATURE_COLUMNS`."""
    smp = surface.samples
    grad = grad_II_norm(surface)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CURVATURE_COLUMNS)
    for i in range(len(smp.p)):
        writer.writerow(
            [f"{smp.s[i]:.12e}", f"{smp.x[i]:.12e}", f"{smp.rho[i]:.12e}", smp.region[i]]
            + [f"{v:.12e}" for v in (
                smp.kappa_mu[i], smp.kappa_pi[i], smp.H[i], smp.K[i],
                smp.dkappa_mu[i], smp.dkappa_pi[i], grad[i],
            )]
        )
    return _write(buf.getvalue(), path)


def report_json(surface, mesh_resolution=256, path=None, **dump):
    text = json.dumps(geometry_report(surface, mesh_resolution), **dump)
    return _write(text, path)

