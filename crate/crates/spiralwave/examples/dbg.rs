use spiralwave::specfun::*;
use spiralwave::Complex64;
fn main() {
    let cfg = SeriesConfig::default();
    // check I_1(2) from an independent high-precision route: mpmath cross-check below
    let nu = Complex64::new(1.0, -1.0);
    for z in [Complex64::new(10.36, 23.66), Complex64::new(20.22, 67.99), Complex64::new(30.21, 132.04)] {
        let v = theta(nu, z, &cfg).unwrap();
        println!("Theta_(1-i)({z}) = {v}  |.| = {:.3e}", v.norm());
    }
    let origin = theta(nu, Complex64::new(0.0,0.0), &cfg).unwrap();
    println!("Theta at 0: {origin} norm {:.3e}", origin.norm());
    // winding scan counts
    let scan = theta_zeros(nu, Rect::new(0.0, 40.0, 0.0, 140.0), 0.5, &cfg).unwrap();
    println!("zeros: {:?}", scan.zeros);
    println!("dropped: {:?}", scan.dropped.len());
}
