def merge_opts(opts, more):
    opts = load(opts)
    if opts is None:
        opts = {}
    opts.update(more)
    return opts
