//! Thin command-line wrapper around the library's pipeline drivers.

fn main() {
    std::process::exit(idospec::cli::main_entry());
}
