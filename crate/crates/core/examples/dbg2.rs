use kswcf::scanner::*;
use num::complex::Complex64;

fn main() {
    let config = ScannerConfig::default();
    for j in 0..12 {
        let arg = std::f64::consts::PI * (j as f64) / 6.0;
        let t = Complex64::from_polar(3.0, arg);
        let p = Poly::from_descending(vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(-3.0, 0.0),
            t,
        ]).unwrap();
        let diff = PolynomialDifferential::new(p, &config).unwrap();
        match find_saddles(&diff, (0.005, 0.995), &config) {
            Ok(records) => {
                let mut info: Vec<String> = records.iter()
                    .map(|r| format!("({},{})th={:.3}", r.zero_a, r.zero_b, r.theta))
                    .collect();
                info.sort();
                println!("arg={:.2}pi: {} saddles {:?}", arg / std::f64::consts::PI, records.len(), info);
            }
            Err(e) => println!("arg={:.2}pi: ERROR {e}", arg / std::f64::consts::PI),
        }
    }
}
