"""Add vehicle registry

Revision ID: 4c1d2e7f9a10
Revises:
Create Date: 2024-04-02 10:12:41.517302

"""
from alembic import op
import sqlalchemy as sa


# revision identifiers, used by Alembic.
revision = '4c1d2e7f9a10'
down_revision = None
branch_labels = None
depends_on = None


def upgrade():
    # ### commands auto generated by Alembic - please adjust! ###
    op.create_table('vehicles',
    sa.Column('vehicle_id', sa.String(length=64), nullable=False),
    sa.Column('title_valid', sa.Boolean(), nullable=False),
    sa.Column('insurance_valid', sa.Boolean(), nullable=False),
    sa.Column('condition', sa.String(length=16), nullable=False),
    sa.Column('driver_id', sa.String(length=64), nullable=True),
    sa.Column('registered_at', sa.DateTime(), nullable=True),
    sa.PrimaryKeyConstraint('vehicle_id')
    )
    op.create_index(op.f('ix_vehicles_driver_id'), 'vehicles', ['driver_id'], unique=False)
    # ### end Alembic commands ###


def downgrade():
    # ### commands auto generated by Alembic - please adjust! ###
    op.drop_index(op.f('ix_vehicles_driver_id'), table_name='vehicles')
    op.drop_table('vehicles')
    # ### end Alembic commands ###
