def fetch_json(session, url):
    resp = session.get(url)
    return json.loads(resp.content)
