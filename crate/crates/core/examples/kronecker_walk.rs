use std::time::Instant;
use cluster_core::seed::Seed;

fn main() {
    let s = Seed::from_exchange_matrix(vec![vec![0, 2], vec![-2, 0]]).unwrap();
    let mut cur = s.clone();
    let t = Instant::now();
    for d in 0..64 {
        let k = d % 2;
        let t0 = Instant::now();
        let next = cur.mutate(k).unwrap();
        let t1 = t0.elapsed();
        let t2 = Instant::now();
        let _c = next.canonical();
        let t3 = t2.elapsed();
        if d % 8 == 7 {
            let bits = next.cluster()[k].terms().map(|(_, c)| c.bits()).max().unwrap_or(0);
            println!("depth {} terms {} bits {} mutate {:?} canon {:?}", d + 1, next.cluster()[k].len(), bits, t1, t3);
        }
        cur = next;
    }
    println!("total {:?}", t.elapsed());
}
