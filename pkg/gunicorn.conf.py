bind = "0.0.0.0:8000"
# ingests are serialized by the incident ledger, so one process with threads keeps a single in-memory index
workers = 1
worker_class = 'gthread'
threads = 8
wsgi_app = 'app:make_app()'
