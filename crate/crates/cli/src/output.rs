//! CSV formatting with C-style `%.17g` floats.

use std::io::Write;

use crate::sweep::SweepRow;

/// Formats `v` the way C's `printf("%.17g", v)` does.
pub fn format_g17(v: f64) -> String {
    format_g(v, 17)
}

/// C `%.<prec>g` for `prec >= 1`.
pub fn format_g(v: f64, prec: usize) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return if v.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let prec = prec.max(1);
    // rounding to `prec` digits fixes the decimal exponent used by %g
    let sci = format!("{:.*e}", prec - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= prec as i32 {
        let m = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.unsigned_abs())
    } else {
        let decimals = (prec as i32 - 1 - exp).max(0) as usize;
        strip_zeros(&format!("{:.*}", decimals, v)).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(format_g17).unwrap_or_default()
}

pub const HEADER_TAIL: [&str; 13] = [
    "d_adi", "d_adi1", "d_aia1", "d_aia2", "d_aia3", "d_aia4", "d_aia_opt", "dtau1", "dtau2", "dtau3", "dtau4", "dtau_opt",
    "err",
];

/// Writes the sweep table. The `T` column is present iff `with_temperature`.
pub fn write_sweep_csv<W: Write>(out: W, rows: &[SweepRow], with_temperature: bool) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    let mut header = vec!["t_f"];
    if with_temperature {
        header.push("T");
    }
    header.extend(HEADER_TAIL);
    w.write_record(&header)?;
    for r in rows {
        let mut rec = vec![format_g17(r.t_f)];
        if with_temperature {
            rec.push(opt(r.temperature));
        }
        rec.push(opt(r.d_adi));
        rec.push(opt(r.d_adi1));
        rec.extend(r.d_aia.iter().map(|v| opt(*v)));
        rec.push(opt(r.d_opt));
        rec.extend(r.dtau.iter().map(|v| opt(*v)));
        rec.push(opt(r.dtau_opt));
        rec.push(r.err.clone());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// One sample of a Δτ scan.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanPoint {
    pub temperature: Option<f64>,
    pub dtau: f64,
    pub distance: Option<f64>,
    pub err: String,
}

pub fn write_scan_csv<W: Write>(out: W, points: &[ScanPoint], with_temperature: bool) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    let mut header = Vec::new();
    if with_temperature {
        header.push("T");
    }
    header.extend(["dtau", "d", "err"]);
    w.write_record(&header)?;
    for p in points {
        let mut rec = Vec::new();
        if with_temperature {
            rec.push(opt(p.temperature));
        }
        rec.push(format_g17(p.dtau));
        rec.push(opt(p.distance));
        rec.push(p.err.clone());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}
