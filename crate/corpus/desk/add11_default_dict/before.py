def merge_opts(opts, more):
    opts = load(opts)
    opts.update(more)
    return opts
