use nalgebra::*;
fn main(){
    let x = DMatrix::from_fn(4, 3, |i, j| ((i * 7 + j * 3) % 5) as f64 - 1.0);
    println!("{x}");
    for eps in [5.0*f64::EPSILON, 1e-14] {
    let s = x.clone().try_svd(true,false,eps,10000).unwrap();
    let u = s.u.unwrap();
    println!("{:?} {:?}", s.singular_values.as_slice(), x.tr_mul(&u).column_iter().map(|c| c.norm()).collect::<Vec<_>>());
    }
    println!("{:?}", (&x*x.transpose()).symmetric_eigen().eigenvalues.map(|v| v.max(0.0).sqrt()).as_slice());
}
