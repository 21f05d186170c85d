"""Command line front end.

Exit codes: 0 success, 1 numerical failure, 2 input error. Every command
computes all outputs in memory and writes them only at the end, so a failed
run leaves no partial files.

Options can also come from a plain ``key = value`` file given with
``--config`` (or the ``TAFNOISE_CONFIG`` environment variable); keys are the
long option names with dashes or underscores. Command-line flags win.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from collections import OrderedDict
from pathlib import Path

import numpy as np

from . import __version__
from . import altmodels as alt
from . import io as tio
from . import reference_values as ref
from .constants import AMU, DEBYE, TAU0_DEFAULT, get_ion
from .distributions import FWHM_TO_SIGMA, GaussianMixture
from .errors import InputError, NumericalError, TafNoiseError
from .physics import (
    HeatingRateSeries,
    dominant_energy,
    field_noise_to_heating_rate,
    heating_rate_to_field_noise,
    temperature_rescale,
)
from .pipeline import (
    fit_alpha_by_temperature,
    maybe_t_test,
    predict_alpha_curve,
    run_inversion,
)
from .plotting import render_svg
from .regression import (
    GaussianBasisSpec,
    basis_shift_sweep,
    fit_arrhenius,
    fit_power_law,
    fit_single_gaussian,
    model_heating_rate,
)
from .taf import TafModelConfig
from .telegraph import band_alpha, fit_lorentzian, periodogram_alpha, rts_montecarlo, telegraph_psd

log = logging.getLogger("tafnoise")

CONFIG_ENV = "TAFNOISE_CONFIG"
TWO_PI = 2 * np.pi


# --------------------------------------------------------------------------- helpers

def _float_list(text):
    try:
        return [float(x) for x in str(text).split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _bool(text):
    if isinstance(text, bool):
        return text
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected a boolean, got {text!r}")


def read_config_file(path):
    """Parse ``key = value`` lines; '#' starts a comment."""
    cfg = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise InputError(f"cannot read config file {path}: {exc}") from exc
    for n, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InputError(f"{path}:{n}: expected key = value")
        k, v = (s.strip() for s in line.split("=", 1))
        cfg[k.replace("-", "_")] = v
    return cfg


def _taf_config(args) -> TafModelConfig:
    return TafModelConfig(tau0_s=args.tau0, e_min_eV=args.e_min, e_max_eV=args.e_max, e_step_eV=args.e_step,
                          max_correction_iter=args.max_iter, correction_tol=args.correction_tol,
                          fd_rel_step=args.fd_step)


def _config_echo(args):
    skip = {"func", "config"}
    return OrderedDict((k, v) for k, v in sorted(vars(args).items()) if k not in skip)


def _load_series(args, temperature_scan=True):
    data = tio.read_heating_rates(args.input)
    if getattr(args, "location", None):
        if args.location not in data:
            raise InputError(f"location {args.location!r} not in {args.input} (have {list(data)})")
        data = OrderedDict([(args.location, data[args.location])])
    if temperature_scan:
        for s in data.values():
            s.validate_temperature_scan()
    return data


def _safe(name):
    return "".join(c if c.isalnum() or c in "-_." else "_" for c in str(name)) or "location"


def _hr_series(x, y, label, yerr=None, style="both"):
    return {"x": list(map(float, x)), "y": list(map(float, y)), "label": label, "style": style,
            "yerr": None if yerr is None else list(map(float, yerr))}


# --------------------------------------------------------------------------- convert

def cmd_convert(args, out: tio.OutputSet):
    ion = get_ion(args.ion)
    header, rows = tio.read_table(args.input, ("frequency_Hz",))
    if args.inverse:
        need, add = tio.FIELD_NOISE_COLUMNS, ("hr_q_per_s", "hr_err_q_per_s")
    else:
        need, add = ("hr_q_per_s", "hr_err_q_per_s"), tio.FIELD_NOISE_COLUMNS
    missing = [c for c in need if c not in header]
    if missing:
        raise InputError(f"{args.input}: missing columns {missing}")
    cols = [c for c in header if c not in add] + list(add)
    table = []
    for lineno, row in rows:
        w = TWO_PI * tio._float(row, "frequency_Hz", args.input, lineno)
        v = tio._float(row, need[0], args.input, lineno)
        e = tio._float(row, need[1], args.input, lineno)
        fn = field_noise_to_heating_rate if args.inverse else heating_rate_to_field_noise
        try:
            new = {add[0]: float(fn(v, w, ion)), add[1]: float(fn(e, w, ion))}
        except InputError as exc:
            raise InputError(f"{args.input}:{lineno}: {exc}") from None
        merged = dict(row)
        merged.update({k: tio.fmt(x) for k, x in new.items()})
        table.append([merged[c] for c in cols])
    out.add(args.output, tio.table_csv(cols, table))
    return 0


# --------------------------------------------------------------------------- invert / alpha

def _inversion_outputs(inv, outdir, out: tio.OutputSet, ion, figures=True):
    D_corr = inv.window(inv.D_corr)
    D_ddh = inv.window(inv.D_ddh)
    out.add(outdir / "distribution.csv", tio.distribution_csv(
        D_corr, {"density_ddh": D_ddh.densities},
        comments=[f"location {inv.location}", "density in arbitrary units per eV; density_ddh is before correction"]))
    out.add(outdir / "distribution_points.csv", tio.distribution_csv(inv.D_points))
    T = inv.smooth.temperature_K
    w = inv.omega
    res = {
        "temperature_K": T,
        "S_smooth": inv.smooth.values,
        "S_taf_ddh": inv.S_taf_ddh,
        "S_taf_corr": inv.S_taf_corr,
        "residual_ddh": inv.S_taf_ddh / inv.smooth.values - 1,
        "residual_corr": inv.S_taf_corr / inv.smooth.values - 1,
    }
    out.add(outdir / "residuals.csv", tio.columns_csv(res))
    if figures:
        hr = lambda S: field_noise_to_heating_rate(S, w, ion)
        Tm = inv.measured.temperature_K
        out.add(outdir / "heating_rates.svg", render_svg([
            _hr_series(Tm, hr(inv.measured.values), "measured",
                       None if inv.measured.err is None else hr(inv.measured.errors), "markers"),
            _hr_series(T, hr(inv.smooth.values), "smoothed", style="line"),
            _hr_series(T, hr(inv.S_taf_ddh), "TAF(D_DDH)", style="line"),
            _hr_series(T, hr(inv.S_taf_corr), "TAF(D_corr)", style="line"),
        ], "temperature (K)", "heating rate (quanta/s)", f"location {inv.location}"))
        out.add(outdir / "distribution.svg", render_svg([
            _hr_series(inv.D_points.energies_eV, inv.D_points.densities, "from data",
                       inv.D_points.density_err, "markers"),
            _hr_series(D_ddh.energies_eV, D_ddh.densities, "DDH", style="line"),
            _hr_series(D_corr.energies_eV, D_corr.densities, "corrected", style="line"),
        ], "activation energy (eV)", "fluctuator density (arb. units)", f"location {inv.location}"))
    return {
        "energy_support_eV": [float(D_corr.energies_eV[0]), float(D_corr.energies_eV[-1])],
        "correction": inv.correction.as_dict(),
        "notes": inv.notes,
    }


def _invert_locations(args, data, outdir, out, figures=True, alpha=False):
    ion = get_ion(args.ion)
    cfg = _taf_config(args)
    results = OrderedDict()
    residuals = OrderedDict()
    for loc, series in data.items():
        inv = run_inversion(series, ion, cfg, args.span, args.degree, args.n_grid, args.extend_K)
        sub = outdir / _safe(loc)
        summary = _inversion_outputs(inv, sub, out, ion, figures)
        residuals[loc] = {"temperature_K": summary["correction"]["temperature_K"],
                          "before_correction": summary["correction"]["initial_residual"],
                          "after_correction": summary["correction"]["final_residual"]}
        if alpha:
            curve = predict_alpha_curve(inv, cfg)
            out.add(sub / "alpha.csv", tio.columns_csv(curve))
            if figures:
                out.add(sub / "alpha.svg", render_svg([
                    _hr_series(curve["temperature_K"], curve["alpha_predicted"], "from dlnS/dlnT", style="line"),
                    _hr_series(curve["temperature_K"], curve["alpha_taf_model"], "TAF model", style="line"),
                ], "temperature (K)", "frequency exponent alpha", f"location {loc}"))
            summary["alpha_range"] = [float(np.min(curve["alpha_predicted"])), float(np.max(curve["alpha_predicted"]))]
            summary["alpha_at_ends"] = {
                "T_low": float(curve["temperature_K"][0]), "alpha_low": float(curve["alpha_predicted"][0]),
                "T_high": float(curve["temperature_K"][-1]), "alpha_high": float(curve["alpha_predicted"][-1])}
        results[loc] = summary
    return results, residuals


def cmd_invert(args, out):
    outdir = Path(args.out_dir)
    data = _load_series(args)
    results, residuals = _invert_locations(args, data, outdir, out, figures=not args.no_figures)
    worst = max(r["correction"]["max_final_residual"] for r in results.values())
    doc = tio.make_report("invert", _config_echo(args), "taf_ddh_corrected",
                          parameters={k: {"energy_support_eV": v["energy_support_eV"]} for k, v in results.items()},
                          statistics={"max_corrected_residual": worst,
                                      "correction_tolerance": args.correction_tol},
                          residuals=residuals,
                          notes=[n for r in results.values() for n in r["notes"]],
                          results=results, outputs=[str(p) for p in out.paths])
    out.add(outdir / "report.json", tio.report_json(doc))
    return 0


def _alpha_fit_outputs(args, data, outdir, out, figures=True):
    per_loc = OrderedDict()
    results = OrderedDict()
    rows = []
    fig_series = []
    for i, (loc, series) in enumerate(data.items()):
        fits = fit_alpha_by_temperature(series)
        per_loc[loc] = fits
        results[loc] = [dict(est.as_dict(), **{"fit": rep.as_dict()}) for est, rep in fits]
        for est, rep in fits:
            rows.append([loc, est.temperature_K, est.alpha, est.alpha_err,
                         est.frequency_band[0] / TWO_PI, est.frequency_band[1] / TWO_PI])
        fig_series.append(_hr_series([e.temperature_K for e, _ in fits], [e.alpha for e, _ in fits],
                                     f"location {loc}", [e.alpha_err for e, _ in fits], "markers"))
    out.add(outdir / "alpha_fit.csv", tio.table_csv(
        ("location", "temperature_K", "alpha", "alpha_err", "f_low_Hz", "f_high_Hz"), rows))
    if figures:
        out.add(outdir / "alpha_fit.svg", render_svg(fig_series, "temperature (K)", "frequency exponent alpha"))
    test = maybe_t_test(per_loc)
    return results, test


def cmd_alpha(args, out):
    outdir = Path(args.out_dir)
    if args.mode == "predict":
        data = _load_series(args)
        results, residuals = _invert_locations(args, data, outdir, out, not args.no_figures, alpha=True)
        doc = tio.make_report("alpha", _config_echo(args), "alpha_predict",
                              parameters={k: {"alpha_range": v["alpha_range"], "alpha_at_ends": v["alpha_at_ends"]}
                                          for k, v in results.items()},
                              residuals=residuals, results=results, outputs=[str(p) for p in out.paths])
    else:
        data = _load_series(args, temperature_scan=False)
        results, test = _alpha_fit_outputs(args, data, outdir, out, not args.no_figures)
        stats = {} if test is None else {"delta_alpha_t_test": test.as_dict()}
        doc = tio.make_report("alpha", _config_echo(args), "frequency_scaling_fit", parameters=results,
                              statistics=stats, outputs=[str(p) for p in out.paths],
                              reference={"alpha_room_temperature": ref.ALPHA_ROOM_TEMPERATURE,
                                         "alpha_high_temperature": ref.ALPHA_HIGH_TEMPERATURE,
                                         "delta_alpha_test": ref.DELTA_ALPHA_TEST})
    out.add(outdir / "report.json", tio.report_json(doc))
    return 0


# --------------------------------------------------------------------------- fit

def _fit_temperature_model(args, data, outdir, out, fitter, name):
    results = OrderedDict()
    for loc, series in data.items():
        rep = fitter(series)
        results[loc] = rep.as_dict()
        if not args.no_figures:
            T = series.temperature_K
            Tf = np.linspace(T[0], T[-1], 200)
            if name == "power_law":
                model = rep.value("ndot0") * Tf ** rep.value("gamma")
            else:
                model = rep.value("ndot0") * np.exp(-rep.value("T0") / Tf)
            out.add(outdir / f"{name}_{_safe(loc)}.svg", render_svg([
                _hr_series(T, series.heating_rate, "data", series.heating_rate_err, "markers"),
                _hr_series(Tf, model, name.replace("_", " "), style="line"),
            ], "temperature (K)", "heating rate (quanta/s)", f"location {loc}"))
    return results


def _gaussian_fits(args, data, outdir, out):
    ion = get_ion(args.ion)
    cfg = _taf_config(args)
    if args.reference_basis:
        spec = GaussianBasisSpec.reference()
    else:
        spec = GaussianBasisSpec(args.n_gaussians, args.center_min, args.center_max, args.fwhm)
    shifts = args.basis_shift or [0.0]
    results = OrderedDict()
    E = np.linspace(0.0, 1.2, 601)
    for loc, series in data.items():
        fits = basis_shift_sweep(series, spec, shifts, cfg, ion)
        loc_res = []
        dist_cols = OrderedDict(energy_eV=E)
        T = series.temperature_K
        Tf = np.linspace(T[0], T[-1], 100)
        w = series.frequency_rad_per_s[0]
        grid = HeatingRateSeries.from_arrays(loc, Tf, w, 1.0)
        spec_cols = OrderedDict(temperature_K=Tf)
        for s, (D, rep) in zip(shifts, fits):
            d = rep.as_dict()
            d["basis_shift_eV"] = s
            d["rms_residual"] = float(np.sqrt(np.mean(rep.residuals**2)))
            loc_res.append(d)
            dist_cols[f"density_shift_{s:g}"] = D(E)
            spec_cols[f"hr_shift_{s:g}"] = model_heating_rate(D, grid, cfg, ion)
        rms = [r["rms_residual"] for r in loc_res]
        if args.single:
            Dg, rg = fit_single_gaussian(series, cfg, ion)
            loc_res.append(dict(rg.as_dict(), rms_residual=float(np.sqrt(np.mean(rg.residuals**2)))))
            dist_cols["density_single"] = Dg(E)
            spec_cols["hr_single"] = model_heating_rate(Dg, grid, cfg, ion)
        results[loc] = {"fits": loc_res, "rms_residual_ratio": max(rms) / min(rms)}
        sub = outdir / _safe(loc)
        out.add(sub / "gaussian_distributions.csv", tio.columns_csv(dist_cols))
        out.add(sub / "gaussian_spectra.csv", tio.columns_csv(spec_cols))
        if not args.no_figures:
            out.add(sub / "gaussian_distributions.svg", render_svg(
                [_hr_series(E, v, k, style="line") for k, v in dist_cols.items() if k != "energy_eV"],
                "activation energy (eV)", "fluctuator density (arb. units)", f"location {loc}"))
            out.add(sub / "gaussian_spectra.svg", render_svg(
                [_hr_series(T, series.heating_rate, "data", series.heating_rate_err, "markers")]
                + [_hr_series(Tf, v, k, style="line") for k, v in spec_cols.items() if k != "temperature_K"],
                "temperature (K)", "heating rate (quanta/s)", f"location {loc}"))
    return results


def cmd_fit(args, out):
    outdir = Path(args.out_dir)
    reference = {}
    if args.model == "freqscaling":
        data = _load_series(args, temperature_scan=False)
        results, test = _alpha_fit_outputs(args, data, outdir, out, not args.no_figures)
        stats = {} if test is None else {"delta_alpha_t_test": test.as_dict()}
        reference = {"alpha_room_temperature": ref.ALPHA_ROOM_TEMPERATURE}
    else:
        data = _load_series(args)
        stats = {}
        if args.model == "powerlaw":
            results = _fit_temperature_model(args, data, outdir, out, fit_power_law, "power_law")
            reference = {"power_law": ref.POWER_LAW_FITS}
        elif args.model == "arrhenius":
            results = _fit_temperature_model(args, data, outdir, out, fit_arrhenius, "arrhenius")
            reference = {"arrhenius": ref.ARRHENIUS_FITS}
        else:
            results = _gaussian_fits(args, data, outdir, out)
        if args.model in ("powerlaw", "arrhenius"):
            stats = {loc: {k: r[k] for k in ("chi2", "dof", "reduced_chi2", "p_value")} for loc, r in results.items()}
    doc = tio.make_report("fit", _config_echo(args), args.model, parameters=results, statistics=stats,
                          reference=reference, outputs=[str(p) for p in out.paths])
    out.add(outdir / "report.json", tio.report_json(doc))
    return 0


# --------------------------------------------------------------------------- altmodel

def cmd_altmodel(args, out):
    notes = []
    if args.model == "diffusion":
        w = TWO_PI * np.array(args.frequency_Hz)
        S = alt.diffusion_spectrum(args.D0, args.E_b, args.temperature, w)
        slope = np.polyfit(np.log(w), np.log(S), 1)[0] if w.size > 1 else -2.0
        params = {"frequency_Hz": args.frequency_Hz, "S": S, "loglog_frequency_slope": slope,
                  "arrhenius_T0_K": args.E_b / alt.K_B_EV}
        notes.append("diffusion on a flat surface predicts 1/f^2 noise")
    elif args.model == "adatom":
        mass = args.adatom_mass_amu * AMU
        mat = alt.MaterialParams(args.speed_of_sound, args.density, args.debye_frequency)
        params = alt.adatom_model(args.T0, mass, args.temperature, mat)
        params["gamma0_reference_Hz"] = ref.GAMMA0_REFERENCE_HZ
        notes.extend(params.pop("notes"))
    elif args.model == "johnson":
        sv = float(alt.johnson_voltage_noise(args.temperature, args.resistance))
        se = alt.johnson_field_estimate(args.temperature, args.resistance, args.distance)
        params = {"S_V_V2_per_Hz": sv, "S_E_V2_per_m2_Hz": se.value}
        if args.measured_S_E:
            params["ratio_to_measured"] = se.value / args.measured_S_E
        notes.extend(se.notes)
        notes.append("Johnson noise is white in frequency")
    else:
        D = GaussianMixture.single(args.center, args.fwhm, 1.0 / (args.fwhm * FWHM_TO_SIGMA * np.sqrt(2 * np.pi)))
        p = alt.DipoleModelParams(args.dipole_debye * DEBYE, args.distance, D)
        w = TWO_PI * args.frequency_Hz[0]
        r = alt.dipole_density_solve(args.S_E, p, w, args.temperature, args.tau0)
        params = {"areal_density_per_m2": r.value, "areal_density_per_nm2": r.value * 1e-18,
                  "dominant_energy_eV": float(dominant_energy(w, args.temperature, args.tau0)),
                  "S_mu": alt.dipole_spectrum(p, w, args.temperature, args.tau0)}
        notes.extend(r.notes)
    doc = tio.make_report("altmodel", _config_echo(args), args.model, parameters=params, notes=notes)
    out.add(Path(args.out_dir) / "report.json", tio.report_json(doc))
    return 0


# --------------------------------------------------------------------------- sweep-temp

def cmd_sweep_temp(args, out):
    outdir = Path(args.out_dir)
    data = _load_series(args)
    summary = OrderedDict()
    overlay = OrderedDict()
    for scale in args.scales:
        scaled = OrderedDict((k, temperature_rescale(s, args.room_K, scale)) for k, s in data.items())
        sub = outdir / f"scale_{scale:g}"
        sub_out = tio.OutputSet()
        results, residuals = _invert_locations(args, scaled, sub, sub_out, not args.no_figures, alpha=True)
        doc = tio.make_report("sweep-temp", dict(_config_echo(args), scale=scale), "taf_ddh_corrected",
                              parameters={k: {"energy_support_eV": v["energy_support_eV"],
                                              "alpha_range": v["alpha_range"]} for k, v in results.items()},
                              residuals=residuals, results=results, outputs=[str(p) for p in sub_out.paths])
        sub_out.add(sub / "report.json", tio.report_json(doc))
        for p in sub_out.paths:
            out.add(p, sub_out._files[p])
        summary[f"{scale:g}"] = {k: v["energy_support_eV"] for k, v in results.items()}
        for loc, s in scaled.items():
            overlay.setdefault(loc, []).append((scale, s))
    if not args.no_figures:
        for loc, items in overlay.items():
            out.add(outdir / f"overlay_{_safe(loc)}.svg", render_svg(
                [_hr_series(s.temperature_K, s.heating_rate, f"scale {sc:g}", s.heating_rate_err, "markers")
                 for sc, s in items], "temperature (K)", "heating rate (quanta/s)", f"location {loc}"))
    doc = tio.make_report("sweep-temp", _config_echo(args), "temperature_uncertainty_sweep",
                          parameters={"energy_support_eV": summary}, outputs=[str(p) for p in out.paths])
    out.add(outdir / "report.json", tio.report_json(doc))
    return 0


# --------------------------------------------------------------------------- simulate / plot

def cmd_simulate(args, out):
    pg = rts_montecarlo(args.energies, args.temperature, args.tau0, args.duration, args.sample_rate,
                        args.seed, args.nperseg)
    rates = pg.rates
    analytic = telegraph_psd(pg.frequency_Hz, rates) if rates.size else np.zeros_like(pg.frequency_Hz)
    out.add(args.output, tio.columns_csv(OrderedDict(frequency_Hz=pg.frequency_Hz, psd=pg.psd, psd_analytic=analytic),
                                         comments=[f"T={args.temperature!r} K seed={args.seed}"]))
    if args.report:
        params = {"rates_per_s": rates, "n_segments": pg.n_segments}
        if rates.size == 1:
            fc = rates[0] / TWO_PI
            fit = fit_lorentzian(pg, fc / 10, fc * 10)
            params.update(corner_rate_fit=fit.corner_rate, corner_rate_err=fit.corner_rate_err,
                          reduced_chi2=fit.reduced_chi2, corner_rate_relative_error=fit.corner_rate / rates[0] - 1)
        elif rates.size > 1 and args.band:
            params.update(alpha_periodogram=periodogram_alpha(pg, *args.band),
                          alpha_analytic=band_alpha(rates, *args.band))
        doc = tio.make_report("simulate", _config_echo(args), "random_telegraph", parameters=params)
        out.add(args.report, tio.report_json(doc))
    if args.figure:
        out.add(args.figure, render_svg([
            _hr_series(pg.frequency_Hz, np.maximum(pg.psd, 1e-300), "periodogram", style="line"),
            _hr_series(pg.frequency_Hz, np.maximum(analytic, 1e-300), "analytic", style="line"),
        ], "frequency (Hz)", "PSD (1/Hz)", logx=True, logy=True))
    return 0


def cmd_plot(args, out):
    series = []
    for path in args.data:
        cols = [args.x, args.y] + ([args.yerr] if args.yerr else [])
        d = tio.read_columns(path, cols)
        series.append(_hr_series(d[args.x], d[args.y], Path(path).stem,
                                 d[args.yerr] if args.yerr else None, args.style))
    out.add(args.output, render_svg(series, args.xlabel or args.x, args.ylabel or args.y, args.title,
                                    args.logx, args.logy))
    return 0


# --------------------------------------------------------------------------- parser

def _add_common(p):
    p.add_argument("--config", help=f"key = value config file (default from ${CONFIG_ENV})")
    p.add_argument("-v", "--verbose", action="store_true")


def _add_taf(p):
    p.add_argument("--ion", default="40Ca+")
    p.add_argument("--tau0", type=float, default=TAU0_DEFAULT, help="attempt time in s")
    p.add_argument("--e-min", type=float, default=0.0)
    p.add_argument("--e-max", type=float, default=2.0)
    p.add_argument("--e-step", type=float, default=1e-3)
    p.add_argument("--max-iter", type=int, default=3, help="maximum correction steps")
    p.add_argument("--correction-tol", type=float, default=0.02)
    p.add_argument("--fd-step", type=float, default=0.01, help="relative finite-difference step")


def _add_smoothing(p):
    p.add_argument("--span", type=float, default=0.6)
    p.add_argument("--degree", type=int, default=2)
    p.add_argument("--n-grid", type=int, default=100)
    p.add_argument("--extend-K", dest="extend_K", type=float, default=150.0)


def build_parser():
    parser = argparse.ArgumentParser(prog="tafnoise", description="Electric-field noise analysis for thermally activated fluctuators in ion traps.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("convert", help="heating rate <-> field noise per CSV row")
    _add_common(p)
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--ion", default="40Ca+")
    p.add_argument("--inverse", action="store_true", help="field noise columns -> heating rates")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("invert", help="DDH inversion with correction")
    _add_common(p)
    p.add_argument("input")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--location")
    p.add_argument("--no-figures", action="store_true")
    _add_taf(p)
    _add_smoothing(p)
    p.set_defaults(func=cmd_invert)

    p = sub.add_parser("alpha", help="frequency exponent: predict from S(T) or fit frequency scans")
    _add_common(p)
    p.add_argument("input")
    p.add_argument("--mode", choices=("predict", "fit"), default="predict")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--location")
    p.add_argument("--no-figures", action="store_true")
    _add_taf(p)
    _add_smoothing(p)
    p.set_defaults(func=cmd_alpha)

    p = sub.add_parser("fit", help="power-law, Arrhenius, frequency-scaling or Gaussian-basis fits")
    _add_common(p)
    p.add_argument("model", choices=("powerlaw", "arrhenius", "freqscaling", "gaussians"))
    p.add_argument("input")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--location")
    p.add_argument("--no-figures", action="store_true")
    p.add_argument("--n-gaussians", type=int, default=5)
    p.add_argument("--center-min", type=float, default=0.3)
    p.add_argument("--center-max", type=float, default=0.65)
    p.add_argument("--fwhm", type=float, default=None, help="default: centre spacing")
    p.add_argument("--reference-basis", action="store_true", help="5 Gaussians, 0.3-0.65 eV, fwhm 0.07 eV")
    p.add_argument("--basis-shift", type=_float_list, default=None, help="comma-separated shifts in eV")
    p.add_argument("--single", action="store_true", help="also fit one free Gaussian")
    _add_taf(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("altmodel", help="evaluate alternative noise models")
    _add_common(p)
    p.add_argument("model", choices=("diffusion", "adatom", "johnson", "dipole"))
    p.add_argument("--out-dir", required=True)
    p.add_argument("--temperature", type=float, default=530.0)
    p.add_argument("--frequency-Hz", dest="frequency_Hz", type=_float_list, default=[1e6])
    p.add_argument("--tau0", type=float, default=TAU0_DEFAULT)
    p.add_argument("--D0", type=float, default=1.0)
    p.add_argument("--E-b", dest="E_b", type=float, default=0.05, help="diffusion barrier, eV")
    p.add_argument("--T0", type=float, default=ref.MEAN_ARRHENIUS_T0_K)
    p.add_argument("--adatom-mass-amu", type=float, default=39.9626)
    p.add_argument("--speed-of-sound", type=float, default=alt.ALUMINUM.speed_of_sound_m_per_s)
    p.add_argument("--density", type=float, default=alt.ALUMINUM.density_kg_per_m3)
    p.add_argument("--debye-frequency", type=float, default=alt.ALUMINUM.debye_frequency_Hz)
    p.add_argument("--resistance", type=float, default=ref.HEATER_RESISTANCE_OHM)
    p.add_argument("--distance", type=float, default=None, help="m (johnson: 570e-6, dipole: 72e-6)")
    p.add_argument("--measured-S-E", dest="measured_S_E", type=float, default=None)
    p.add_argument("--S-E", dest="S_E", type=float, default=1e-11, help="measured field noise for dipole model")
    p.add_argument("--dipole-debye", type=float, default=ref.DIPOLE_MOMENT_DEBYE)
    p.add_argument("--center", type=float, default=0.5, help="dipole barrier Gaussian centre, eV")
    p.add_argument("--fwhm", type=float, default=0.3, help="dipole barrier Gaussian fwhm, eV")
    p.set_defaults(func=cmd_altmodel)

    p = sub.add_parser("sweep-temp", help="rerun inversion/alpha with rescaled temperatures")
    _add_common(p)
    p.add_argument("input")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--location")
    p.add_argument("--scales", type=_float_list, default=[0.9, 1.0, 1.1])
    p.add_argument("--room-K", dest="room_K", type=float, default=295.0)
    p.add_argument("--no-figures", action="store_true")
    _add_taf(p)
    _add_smoothing(p)
    p.set_defaults(func=cmd_sweep_temp)

    p = sub.add_parser("simulate", help="Monte Carlo telegraph-noise periodogram")
    _add_common(p)
    p.add_argument("--energies", type=_float_list, required=True, help="activation energies, eV")
    p.add_argument("--temperature", type=float, required=True)
    p.add_argument("--tau0", type=float, default=TAU0_DEFAULT)
    p.add_argument("--duration", type=float, default=0.05)
    p.add_argument("--sample-rate", type=float, default=1e8)
    p.add_argument("--nperseg", type=int, default=8192)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--band", type=_float_list, default=None, help="f_min,f_max in Hz for the alpha estimate")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--report")
    p.add_argument("--figure")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("plot", help="SVG plot of CSV columns")
    _add_common(p)
    p.add_argument("data", nargs="+")
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--yerr")
    p.add_argument("--style", choices=("line", "markers", "both"), default="markers")
    p.add_argument("--logx", type=_bool, nargs="?", const=True, default=False)
    p.add_argument("--logy", type=_bool, nargs="?", const=True, default=False)
    p.add_argument("--xlabel", default="")
    p.add_argument("--ylabel", default="")
    p.add_argument("--title", default="")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_plot)
    return parser


def _subparser(parser, name):
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            return action.choices.get(name)
    return None


def parse_args(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    cfg_path = args.config or os.environ.get(CONFIG_ENV)
    if cfg_path:
        conf = read_config_file(cfg_path)
        sp = _subparser(parser, args.command)
        known = {a.dest for a in sp._actions}
        unknown = sorted(set(conf) - known)
        if unknown:
            raise InputError(f"{cfg_path}: unknown keys {unknown}")
        # config values become defaults; argparse converts string defaults with `type`
        for a in sp._actions:
            if a.dest in conf:
                a.required = False
                if a.const is not None and a.nargs == 0:
                    conf[a.dest] = _bool(conf[a.dest])
        sp.set_defaults(**conf)
        args = parser.parse_args(argv)
    if args.command == "altmodel" and args.distance is None:
        args.distance = ref.HEATER_DISTANCE_M if args.model == "johnson" else ref.ION_SURFACE_DISTANCE_M
    return args


def main(argv=None) -> int:
    try:
        args = parse_args(argv)
    except InputError as exc:
        print(f"tafnoise: error: {exc}", file=sys.stderr)
        return 2
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    out = tio.OutputSet()
    try:
        code = args.func(args, out)
        out.commit()
        return code
    except InputError as exc:
        print(f"tafnoise: input error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"tafnoise: numerical failure: {exc}", file=sys.stderr)
        return 1
    except TafNoiseError as exc:
        print(f"tafnoise: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
