//! Drive the command line from code and read its JSON output.

fn run(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = qfib::cli::run(std::iter::once("qfib").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap() + &String::from_utf8(err).unwrap())
}

fn main() {
    for args in [
        &["gen", "--family", "fibonacci", "--from", "1", "--to", "5"][..],
        &["eval", "--family", "jacobsthal-lucas", "--n", "2", "--at", "1/2"],
        &["qpow", "--family", "fibonacci", "--n", "2"],
        &["check", "--identity", "lucas_cassini", "--family", "pell-lucas", "--max-n", "20"],
        &["check", "--identity", "catalan"],
    ] {
        let (code, text) = run(args);
        println!("$ qfib {}  [exit {code}]\n{text}", args.join(" "));
    }

    let (_, json) = run(&["--format", "json", "eval", "--family", "pell", "--n", "30", "--at", "-1/3"]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    println!("P_30(-1/3) = {}", v["value"]);
}
