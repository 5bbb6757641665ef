use std::io::{self, Write};

use clap::ValueEnum;

use underlay_core::network_metrics::Analysis;
use underlay_core::{McEstimate, McReport, Protocol};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
    JsonLines,
}

pub struct Row {
    protocol: &'static str,
    params: Vec<(&'static str, f64)>,
    mu: [f64; 3],
    kappa: [f64; 3],
    raw: [f64; 3],
    pout: f64,
    mean_active: f64,
    mc: Option<[McEstimate; 5]>,
    trials: u64,
}

impl Row {
    pub fn analytic(p: Protocol, a: &Analysis<f64>) -> Self {
        let c = &a.cumulants;
        let raw = c.aggregate_raw_moments();
        Row {
            protocol: p.name(),
            params: params(p),
            mu: [c.single_moments[0], c.single_moments[1], c.single_moments[2]],
            kappa: [c.values[0], c.values[1], c.values[2]],
            raw: [raw[0], raw[1], raw[2]],
            pout: a.outage,
            mean_active: a.mean_active,
            mc: None,
            trials: 0,
        }
    }

    pub fn simulated(p: Protocol, a: &Analysis<f64>, mc: &McReport) -> Self {
        let mut row = Self::analytic(p, a);
        row.mc = Some([
            mc.raw_moments[0],
            mc.raw_moments[1],
            mc.raw_moments[2],
            mc.outage,
            mc.mean_active,
        ]);
        row.trials = mc.outage.trials;
        row
    }

    fn param_text(&self) -> String {
        if self.params.is_empty() {
            return "-".into();
        }
        self.params
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(" ")
    }

    fn json_params(&self) -> String {
        self.params
            .iter()
            .map(|(k, v)| format!(",\"{k}\":{}", json_num(*v)))
            .collect()
    }
}

fn params(p: Protocol) -> Vec<(&'static str, f64)> {
    match p {
        Protocol::FullActivity => vec![],
        Protocol::GuardZone { r_f } => vec![("r_f", r_f)],
        Protocol::Threshold { gamma } => vec![("gamma", gamma)],
        Protocol::Cooperation { gamma, r_c } => vec![("gamma", gamma), ("r_c", r_c)],
    }
}

fn json_num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:e}")
    } else {
        "null".into()
    }
}

const QUANTITIES: [&str; 5] = ["E[I]", "E[I^2]", "E[I^3]", "P_out", "mean_active"];

pub fn write_analysis<W: Write>(rows: &[Row], format: Format, out: &mut W) -> io::Result<()> {
    match format {
        Format::Table => {
            writeln!(
                out,
                "{:<12} {:<20} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12}",
                "protocol",
                "parameters",
                "mu_I(1)",
                "mu_I(2)",
                "mu_I(3)",
                "kappa(1)",
                "kappa(2)",
                "kappa(3)",
                "E[I]",
                "E[I^2]",
                "E[I^3]",
                "P_out",
                "mean_active"
            )?;
            for r in rows {
                write!(out, "{:<12} {:<20}", r.protocol, r.param_text())?;
                for v in r.mu.iter().chain(&r.kappa).chain(&r.raw).chain([&r.pout]) {
                    write!(out, " {v:>12.4e}")?;
                }
                writeln!(out, " {:>12.3}", r.mean_active)?;
            }
        }
        Format::Csv => {
            writeln!(
                out,
                "protocol,parameters,mu1,mu2,mu3,kappa1,kappa2,kappa3,agg_moment1,agg_moment2,agg_moment3,pout,mean_active"
            )?;
            for r in rows {
                write!(out, "{},{}", r.protocol, r.param_text())?;
                for v in
                    r.mu.iter()
                        .chain(&r.kappa)
                        .chain(&r.raw)
                        .chain([&r.pout, &r.mean_active])
                {
                    write!(out, ",{v:e}")?;
                }
                writeln!(out)?;
            }
        }
        Format::JsonLines => {
            for r in rows {
                writeln!(
                    out,
                    "{{\"protocol\":\"{}\"{},\"mu\":[{},{},{}],\"kappa\":[{},{},{}],\"agg_moments\":[{},{},{}],\"pout\":{},\"mean_active\":{}}}",
                    r.protocol,
                    r.json_params(),
                    json_num(r.mu[0]),
                    json_num(r.mu[1]),
                    json_num(r.mu[2]),
                    json_num(r.kappa[0]),
                    json_num(r.kappa[1]),
                    json_num(r.kappa[2]),
                    json_num(r.raw[0]),
                    json_num(r.raw[1]),
                    json_num(r.raw[2]),
                    json_num(r.pout),
                    json_num(r.mean_active)
                )?;
            }
        }
    }
    Ok(())
}

pub fn write_simulation<W: Write>(rows: &[Row], format: Format, out: &mut W) -> io::Result<()> {
    if format == Format::Csv {
        writeln!(
            out,
            "protocol,parameters,quantity,analytic,simulation,std_error,z,trials"
        )?;
    }
    for r in rows {
        let Some(mc) = &r.mc else { continue };
        let analytic = [r.raw[0], r.raw[1], r.raw[2], r.pout, r.mean_active];
        match format {
            Format::Table => {
                writeln!(out, "{} {} ({} trials)", r.protocol, r.param_text(), r.trials)?;
                writeln!(
                    out,
                    "  {:<12} {:>13} {:>13} {:>11} {:>8}",
                    "quantity", "analytic", "simulation", "std_error", "z"
                )?;
                for ((q, a), e) in QUANTITIES.iter().zip(analytic).zip(mc) {
                    writeln!(
                        out,
                        "  {:<12} {:>13.6e} {:>13.6e} {:>11.3e} {:>8.2}",
                        q,
                        a,
                        e.value,
                        e.std_error,
                        e.z_score(a)
                    )?;
                }
            }
            Format::Csv => {
                for ((q, a), e) in QUANTITIES.iter().zip(analytic).zip(mc) {
                    writeln!(
                        out,
                        "{},{},{},{:e},{:e},{:e},{},{}",
                        r.protocol,
                        r.param_text(),
                        q,
                        a,
                        e.value,
                        e.std_error,
                        e.z_score(a),
                        e.trials
                    )?;
                }
            }
            Format::JsonLines => {
                for ((q, a), e) in QUANTITIES.iter().zip(analytic).zip(mc) {
                    writeln!(
                        out,
                        "{{\"protocol\":\"{}\"{},\"quantity\":\"{}\",\"analytic\":{},\"simulation\":{},\"std_error\":{},\"z\":{},\"trials\":{}}}",
                        r.protocol,
                        r.json_params(),
                        q,
                        json_num(a),
                        json_num(e.value),
                        json_num(e.std_error),
                        json_num(e.z_score(a)),
                        e.trials
                    )?;
                }
            }
        }
    }
    Ok(())
}
