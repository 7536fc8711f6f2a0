fn main() {
    std::process::exit(dsom::cli::main())
}
