use alloc::format;
use alloc::string::String;
use core::fmt::Write;

use crate::program::FlatProgram;

/// Render a flat program as OpenQASM 2.0: header, include, registers, user
/// gate definitions, then one statement per instruction in list order.
pub fn emit(fp: &FlatProgram) -> String {
    let mut s = String::from("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    for r in &fp.qregs {
        let _ = writeln!(s, "qreg {}[{}];", r.name, r.size);
    }
    for r in &fp.cregs {
        let _ = writeln!(s, "creg {}[{}];", r.name, r.size);
    }
    for g in &fp.gate_defs {
        let _ = writeln!(s, "{}", g);
    }
    for inst in &fp.instructions {
        if inst.is_measure() {
            let _ = writeln!(
                s,
                "measure {} -> {};",
                fp.qubit_name(inst.qubits[0]),
                fp.clbit_name(inst.clbits[0])
            );
            continue;
        }
        s.push_str(&inst.op);
        if !inst.params.is_empty() {
            s.push('(');
            for (i, p) in inst.params.iter().enumerate() {
                if i > 0 {
                    s.push(',');
                }
                s.push_str(&format_angle(*p));
            }
            s.push(')');
        }
        for (i, q) in inst.qubits.iter().enumerate() {
            s.push(if i == 0 { ' ' } else { ',' });
            let _ = write!(s, "{}", fp.qubit_name(*q));
        }
        s.push_str(";\n");
    }
    s
}

/// Format with 12 significant digits, positional where reasonable, trailing
/// zeros removed.
pub fn format_angle(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{}", x);
    }
    let sci = format!("{:.11e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(char::is_ascii_digit).collect();
    let mut out = String::new();
    if negative {
        out.push('-');
    }
    if (-5..12).contains(&exp) {
        if exp < 0 {
            out.push_str("0.");
            for _ in 0..(-exp - 1) {
                out.push('0');
            }
            out.push_str(&digits);
        } else {
            let split = exp as usize + 1;
            out.push_str(&digits[..split]);
            out.push('.');
            out.push_str(&digits[split..]);
        }
        trim_fraction(&mut out);
    } else {
        out.push_str(&digits[..1]);
        out.push('.');
        out.push_str(&digits[1..]);
        trim_fraction(&mut out);
        let _ = write!(out, "e{}", exp);
    }
    out
}

fn trim_fraction(s: &mut String) {
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn angles_use_twelve_significant_digits() {
        assert_eq!(format_angle(PI), "3.14159265359");
        assert_eq!(format_angle(-PI / 2.0), "-1.57079632679");
        assert_eq!(format_angle(0.5), "0.5");
        assert_eq!(format_angle(2.0), "2");
        assert_eq!(format_angle(PI / 1024.0), "0.00306796157577");
        assert_eq!(format_angle(1e-9), "1e-9");
        assert_eq!(format_angle(123456789012345.0), "1.23456789012e14");
        assert_eq!(format_angle(0.0), "0");
    }

    #[test]
    fn formatted_angle_is_stable_under_reparse() {
        for &x in &[PI / 3.0, -7.123456789012345, 1.0 / 7.0, 6.02e23, -2.5e-8] {
            let once = format_angle(x);
            let back: f64 = once.parse().unwrap();
            assert!((back - x).abs() <= 1e-11 * x.abs());
            assert_eq!(format_angle(back), once);
        }
    }

    #[test]
    fn empty_program_is_header_and_declarations() {
        let fp = FlatProgram::with_registers(&[("q", 2)], &[("c", 2)]);
        assert_eq!(emit(&fp), "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[2];\ncreg c[2];\n");
    }
}
