//! Exact Bernoulli and double Bernoulli numbers, and a polynomial.

use cmgamma::bernoulli::RationalTable;

fn main() -> cmgamma::Result<()> {
    let table = RationalTable::new(12);
    for k in (0..=12).step_by(2) {
        println!(
            "B_{k:<2} = {:>12}   B_(2,{k}) = {}",
            table.bernoulli_number(k)?,
            table.double_bernoulli_number(k)?
        );
    }
    let b3 = table.bernoulli_poly(3)?;
    println!(
        "B_3(x) coefficients: {:?}",
        b3.coefficients()
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
    );
    println!("\nCSV of the first double Bernoulli numbers:");
    table.write_csv(std::io::stdout(), 4, true)
}
