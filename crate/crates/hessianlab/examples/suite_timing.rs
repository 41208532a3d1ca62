use std::time::Instant;
fn main() {
    let t0 = Instant::now();
    let ops = hessianlab::operators::standard_suite().unwrap();
    let mut all = true;
    for op in &ops {
        let reports = op.verify_all(2000, 42).unwrap();
        for r in &reports {
            if !r.pass {
                all = false;
                println!("{}", r.pass_line());
                if let Some(w) = r.witnesses.first() {
                    println!("   {}", w.detail);
                }
            }
        }
    }
    println!("all pass: {all}, total {:?}", t0.elapsed());
}
