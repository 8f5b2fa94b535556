use endoscope::orbital::*;
use std::time::Instant;

fn run(label: &str, p: u64, case: ClassCase, r: u32) {
    let params = match StableClassParams::new(p, case, r) {
        Ok(p) => p,
        Err(e) => {
            println!("{label}: construct err {e}");
            return;
        }
    };
    let t0 = Instant::now();
    match verify_transfer(&params, VerifyMode::Oracle) {
        Ok(rep) => {
            let k = rep.kappa_oracle.as_ref().unwrap();
            let s = rep.stable_oracle.as_ref().unwrap();
            println!(
                "{label}: pass={} kappa={} (closed {}) stable={} (closed {}) states={} elapsed={:.2?}",
                rep.pass, k.value, rep.kappa_closed, s.value, rep.stable_closed,
                k.states + s.states, t0.elapsed()
            );
        }
        Err(e) => println!("{label}: verify err {e} after {:.2?}", t0.elapsed()),
    }
}

fn main() {
    run("e3 q5 (2,2,2) r0", 5, ClassCase::E3 { a: 2, b: 2, c: 2 }, 0);
    run("e3 q5 (2,2,2) r1", 5, ClassCase::E3 { a: 2, b: 2, c: 2 }, 1);
    run("exel q5 (2,2) r0", 5, ClassCase::Exel { a: 2, b: 2 }, 0);
    run("exel q5 (2,2) r1", 5, ClassCase::Exel { a: 2, b: 2 }, 1);
    run("exel q5 (3,1) r0", 5, ClassCase::Exel { a: 3, b: 1 }, 0);
}
